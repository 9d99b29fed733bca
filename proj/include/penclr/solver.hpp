#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "penclr/types.hpp"

namespace penclr {

// Per-block elastic-net penalty. Column j in block b contributes
//   lambda[b] * ( alpha |beta_j| + (1 - alpha)/2 * beta_j^2 ).
struct PenaltySpec {
  Eigen::VectorXd lambda;                 // one level per block, >= 0
  double alpha = 1.0;                     // L1 share, in (0, 1]
  std::vector<std::uint8_t> unpenalized;  // optional per-column exemption mask

  // throws UsageError on dimension or range violations
  void check(const MatchedDataset& data) const;
};

struct SolverOptions {
  int max_iterations = 1000;
  double objective_tol = 1e-8;  // relative objective decrease
  double coef_tol = 1e-6;       // max absolute coefficient step
  bool standardize = true;      // center/scale columns internally
  bool accelerate = true;       // momentum with monotone restart
};

struct Standardization {
  bool applied = false;
  Eigen::VectorXd center;  // per-column mean (empty when not applied)
  Eigen::VectorXd scale;   // per-column sd; 1 for constant columns
};

struct FitResult {
  Eigen::VectorXd beta;     // on the original covariate scale
  double objective = 0.0;   // neg_log_likelihood(beta) + penalty_value(beta, spec)
  bool converged = false;
  int iterations = 0;
  std::vector<int> nonzero;  // {j : beta_j != 0}, ascending
  PenaltySpec spec;          // echo of the request
  Standardization standardization;
  std::vector<double> objective_history;  // internal objective per accepted iterate
  std::vector<std::string> warnings;
  std::string diagnostic;  // set when converged == false
};

double penalty_value(const Eigen::VectorXd& beta, const PenaltySpec& spec,
                     const std::vector<Index>& block_sizes);

// Proximal gradient on the smooth part (likelihood + ridge) with backtracking
// line search and a soft-threshold step for the weighted L1 part; momentum is
// restarted whenever it would increase the objective, so the recorded
// objective sequence is non-increasing. Coefficients hit exact zeros.
// Non-convergence is reported via converged = false plus a diagnostic.
FitResult fit_penalized(const MatchedDataset& data, const PenaltySpec& spec,
                        const SolverOptions& options = {});

// Smallest per-block level at which beta = 0 is optimal, from the gradient at
// zero: max_{j in block} |grad_j| / alpha. Computed on the scale the solver
// would fit on (see standardize).
Eigen::VectorXd lambda_max_per_block(const MatchedDataset& data, double alpha,
                                     bool standardize = true);

struct KktReport {
  std::vector<std::string> violations;
  double worst = 0.0;  // largest violation margin observed
  bool ok() const { return violations.empty(); }
};

// Subgradient optimality certificate, checked on the scale the fit was solved
// on (fit.standardization). With g_j = grad_j + lambda_b (1 - alpha) beta_j:
//   beta_j != 0:  |g_j + lambda_b alpha sign(beta_j)| <= tol
//   beta_j == 0:  |g_j| <= lambda_b alpha + tol
KktReport kkt_check(const FitResult& fit, const MatchedDataset& data,
                    const PenaltySpec& spec, double tol);

}  // namespace penclr
