#pragma once

#include <Eigen/Core>

#include "penclr/types.hpp"

namespace penclr {

// Negative conditional-logistic log-likelihood:
//   sum_s [ logsumexp_{j in s} eta_j - eta_case ],  eta = X beta.
// The log-sum-exp subtracts the per-stratum maximum before exponentiating,
// so large linear predictors cannot overflow.
double neg_log_likelihood(const Eigen::VectorXd& beta, const MatchedDataset& data);

// Gradient of the negative log-likelihood: X^T (pi - y), where pi is the
// within-stratum softmax of eta and y the case indicator.
Eigen::VectorXd gradient(const Eigen::VectorXd& beta, const MatchedDataset& data);

// Evaluation against an explicit design matrix; strata index into its rows.
// The solver uses these with a standardized copy of the covariates.
double neg_log_likelihood(const Eigen::MatrixXd& design,
                          const std::vector<Stratum>& strata,
                          const Eigen::VectorXd& beta);

// Returns the value and writes the gradient; one pass over the linear
// predictor, two matrix-vector products in total.
double value_and_gradient(const Eigen::MatrixXd& design,
                          const std::vector<Stratum>& strata,
                          const Eigen::VectorXd& beta,
                          Eigen::VectorXd& grad);

}  // namespace penclr
