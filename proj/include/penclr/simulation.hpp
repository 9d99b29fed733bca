#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "penclr/stability.hpp"
#include "penclr/tuning.hpp"
#include "penclr/types.hpp"

namespace penclr {

// Two-block synthetic design: block sizes, active-variable counts and the
// common effect size within each block.
struct SimulationSetting {
  Index p1 = 50, p2 = 50;
  int a1 = 0, a2 = 0;
  double b1 = 0.0, b2 = 0.0;
  int n_pairs = 200;
  int controls_per_case = 1;
  double covariate_sd = 1.0;
  std::uint64_t seed = 0;
};

// The six built-in study settings (1-based).
SimulationSetting builtin_setting(int index);
std::vector<SimulationSetting> builtin_settings();

struct GeneratedDataset {
  MatchedDataset data;
  std::vector<int> active;  // true active column indices, ascending
  Eigen::VectorXd true_beta;
};

// Covariates are iid normal per subject; active positions are drawn uniformly
// within each block; within each stratum the case label goes to member j with
// probability softmax(eta_j). Deterministic given the seed.
GeneratedDataset generate_dataset(const SimulationSetting& setting);

// (power, fdr): power = |sel & truth| / |truth| (0 when truth is empty),
// fdr = |sel \ truth| / |sel| (0 when nothing is selected).
std::pair<double, double> evaluate_selection(const std::vector<int>& selected,
                                             const std::vector<int>& truth,
                                             Index p);

struct StudyConfig {
  int B = 50;
  double alpha = 1.0;
  int n_folds = 5;
  double threshold = 0.55;         // headline summary threshold
  TentativeModel type_step1 = TentativeModel::combined;
  SolverOptions solver;
  double pf_cap = 100.0;
  int workers = 1;                 // parallelism over replicates
};

struct ReplicateOutcome {
  int setting = 0;  // 1-based position in the settings list
  int replicate = 0;
  bool failed = false;
  std::string error;
  double power = 0.0, fdr = 0.0;  // at config.threshold
  std::vector<std::vector<int>> selected_per_threshold;
  std::vector<int> truth;
  Eigen::VectorXd pf;
  double lambda1 = 0.0;
};

struct SettingSummary {
  int setting = 0;
  int replicates = 0;  // successful
  int failures = 0;
  double power = 0.0, fdr = 0.0;               // means at config.threshold
  std::vector<double> sweep_power, sweep_fdr;  // means per threshold
};

struct StudyReport {
  std::vector<double> thresholds;
  std::vector<SettingSummary> settings;
  std::vector<ReplicateOutcome> replicates;
  std::uint64_t seed = 0;
};

// default sweep: 0.55 to 0.90 in steps of 0.05
std::vector<double> default_threshold_grid();

// Per replicate: generate data, choose penalty factors and the overall level
// by cross-validation, run stability selection, then select at each threshold.
// Replicates own derived seeds and run in parallel; a failed replicate is
// recorded rather than fatal, unless every replicate fails.
StudyReport run_study(const std::vector<SimulationSetting>& settings,
                      int replicates, const std::vector<double>& thresholds,
                      const StudyConfig& config, std::uint64_t master_seed);

}  // namespace penclr
