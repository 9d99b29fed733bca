#include "penclr/likelihood.hpp"

#include <cmath>

#include "penclr/errors.hpp"

namespace penclr {

namespace {

void check_beta(const Eigen::VectorXd& beta, Index p) {
  if (beta.size() != p) {
    throw std::invalid_argument("coefficient length " +
                                std::to_string(beta.size()) +
                                " does not match covariate count " +
                                std::to_string(p));
  }
}

}  // namespace

double neg_log_likelihood(const Eigen::MatrixXd& design,
                          const std::vector<Stratum>& strata,
                          const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = design * beta;
  double total = 0.0;
  for (const Stratum& s : strata) {
    const Index case_row = s.case_row();
    double max_eta = eta[case_row];
    for (Index r : s.control_rows) max_eta = std::max(max_eta, eta[r]);
    double sum = std::exp(eta[case_row] - max_eta);
    for (Index r : s.control_rows) sum += std::exp(eta[r] - max_eta);
    total += max_eta + std::log(sum) - eta[case_row];
  }
  return total;
}

double value_and_gradient(const Eigen::MatrixXd& design,
                          const std::vector<Stratum>& strata,
                          const Eigen::VectorXd& beta,
                          Eigen::VectorXd& grad) {
  const Eigen::VectorXd eta = design * beta;
  Eigen::VectorXd resid(design.rows());
  double total = 0.0;
  for (const Stratum& s : strata) {
    const Index case_row = s.case_row();
    double max_eta = eta[case_row];
    for (Index r : s.control_rows) max_eta = std::max(max_eta, eta[r]);
    double sum = std::exp(eta[case_row] - max_eta);
    for (Index r : s.control_rows) sum += std::exp(eta[r] - max_eta);
    total += max_eta + std::log(sum) - eta[case_row];
    // within-stratum softmax minus the case indicator
    resid[case_row] = std::exp(eta[case_row] - max_eta) / sum - 1.0;
    for (Index r : s.control_rows) {
      resid[r] = std::exp(eta[r] - max_eta) / sum;
    }
  }
  grad.noalias() = design.transpose() * resid;
  return total;
}

double neg_log_likelihood(const Eigen::VectorXd& beta, const MatchedDataset& data) {
  check_beta(beta, data.n_covariates());
  return neg_log_likelihood(data.covariates(), data.strata(), beta);
}

Eigen::VectorXd gradient(const Eigen::VectorXd& beta, const MatchedDataset& data) {
  check_beta(beta, data.n_covariates());
  Eigen::VectorXd grad(data.n_covariates());
  value_and_gradient(data.covariates(), data.strata(), beta, grad);
  return grad;
}

}  // namespace penclr
