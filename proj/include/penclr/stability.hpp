#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "penclr/solver.hpp"
#include "penclr/types.hpp"

namespace penclr {

// Two disjoint halves of floor(n/2) stratum indices each; for odd n one
// stratum is left out.
struct SubsamplePair {
  std::vector<int> half_a;
  std::vector<int> half_b;
};

// B pairs from seeded shuffles of the stratum indices; deterministic in
// (n, B, seed). Requires n >= 4 so each half can support a fit.
std::vector<SubsamplePair> draw_complementary_pairs(int n, int B,
                                                    std::uint64_t seed);

struct StabilityConfig {
  std::vector<Eigen::VectorXd> lambda_list;  // s vectors, one level per block
  double alpha = 1.0;
  int B = 100;
  std::uint64_t seed = 0;
  int workers = 1;
  SolverOptions solver;
};

struct StabilityResult {
  Eigen::VectorXd selection_probability;  // per variable: max over grid rows
  Eigen::MatrixXd per_grid_frequency;     // s x p
  std::vector<int> failures_per_vector;   // non-converged fits per grid row
  int total_fits = 0;                     // fits executed: 2 * B * s
  int total_failures = 0;
  StabilityConfig config;                 // echo (lambda_list, alpha, B, seed)
  std::vector<std::string> warnings;
};

// For every penalty vector, fits the model on each of the 2B subsample halves
// and records which coefficients are nonzero. Frequencies divide by the
// converged-fit count per vector; the selection probability of a variable is
// its maximum frequency over the vectors. The subsample schedule is generated
// up front from the seed, so results do not depend on the worker count.
StabilityResult stability_selection(const MatchedDataset& data,
                                    const StabilityConfig& config);

// {j : selection_probability_j >= threshold}; threshold must lie in (0, 1).
std::vector<int> select_variables(const StabilityResult& result,
                                  double threshold);

}  // namespace penclr
