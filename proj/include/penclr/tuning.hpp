#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "penclr/solver.hpp"
#include "penclr/types.hpp"

namespace penclr {

// Relative penalties of the blocks versus the first block. The full penalty
// vector is lambda1 * pf.
struct PenaltyFactors {
  Eigen::VectorXd pf;  // pf[0] == 1, entries in (0, pf_cap]
};

// Fold assignment over strata; a matched set is never split across folds.
struct CvPlan {
  int n_folds = 5;
  std::vector<int> fold_of_stratum;  // stratum index -> fold in [0, n_folds)
};

// Seeded partition into folds whose sizes differ by at most one.
CvPlan make_cv_plan(const MatchedDataset& data, int n_folds, std::uint64_t seed);

// Sum over folds of the held-out deviance 2 * sum_{s in fold} -log L_s(beta),
// with beta fit on the complementary strata. Throws NumericalError naming the
// fold whose training fit does not converge.
double cv_deviance(const MatchedDataset& data, const PenaltySpec& spec,
                   const CvPlan& plan, const SolverOptions& options = {});

struct LambdaSearch {
  double lambda1 = 0.0;          // minimizer; smallest grid value on ties
  std::vector<double> grid;
  std::vector<double> deviance;  // parallel to grid
};

// Evaluates cv_deviance at lambda = lambda1 * pf for every grid point.
LambdaSearch find_default_lambda(const MatchedDataset& data,
                                 const PenaltyFactors& pf, double alpha,
                                 const std::vector<double>& grid,
                                 const CvPlan& plan,
                                 const SolverOptions& options = {},
                                 int workers = 1);

// Geometric grid of n_points values from the smallest lambda1 that zeroes
// every block (given pf) down by a factor of `span`.
std::vector<double> default_lambda_grid(const MatchedDataset& data,
                                        const PenaltyFactors& pf, double alpha,
                                        bool standardize = true,
                                        int n_points = 20, double span = 1000.0);

enum class TentativeModel { separate, combined };

struct PenaltyFactorsResult {
  PenaltyFactors pf;
  Eigen::VectorXd mean_abs_coef;  // m_i per block from the tentative fit(s)
  std::vector<double> lambda1;    // chosen level(s): per block (separate) or one (combined)
  std::vector<std::string> warnings;
};

// Data-adaptive penalty factors. Step 1 fits tentative elastic-net model(s)
// with a CV-chosen level: per block on its own columns (separate) or one model
// on all columns (combined). Step 2 sets pf_i = m_1 / m_i with
// m_i = mean |beta_hat| over block i, pf_1 = 1, clamped to [1/pf_cap, pf_cap];
// a block with m_i = 0 gets pf_cap. Throws NumericalError when every block is
// zero.
PenaltyFactorsResult default_pf(const MatchedDataset& data, double alpha,
                                TentativeModel type_step1, const CvPlan& plan,
                                const SolverOptions& options = {},
                                double pf_cap = 100.0, int workers = 1);

}  // namespace penclr
