#include "penclr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "penclr/errors.hpp"
#include "penclr/parallel.hpp"
#include "penclr/rng.hpp"

namespace penclr {

SimulationSetting builtin_setting(int index) {
  // p1, p2, a1, a2, b1, b2; 200 matched pairs, 100 covariates, 20 actives
  switch (index) {
    case 1: return {50, 50, 10, 10, 4.0, 4.0};
    case 2: return {50, 50, 3, 17, 4.0, 4.0};
    case 3: return {50, 50, 20, 0, 4.0, 0.0};
    case 4: return {20, 80, 10, 10, 4.0, 1.0};
    case 5: return {20, 80, 15, 5, 4.0, 4.0};
    case 6: return {20, 80, 5, 15, 4.0, 4.0};
    default:
      throw UsageError("setting index must lie in 1..6");
  }
}

std::vector<SimulationSetting> builtin_settings() {
  std::vector<SimulationSetting> out;
  for (int i = 1; i <= 6; ++i) out.push_back(builtin_setting(i));
  return out;
}

namespace {

void check_setting(const SimulationSetting& s) {
  if (s.p1 < 0 || s.p2 < 0 || s.p1 + s.p2 < 1) {
    throw UsageError("block sizes must be nonnegative with p1 + p2 >= 1");
  }
  if (s.a1 < 0 || s.a2 < 0 || s.a1 > s.p1 || s.a2 > s.p2) {
    throw UsageError("active counts must satisfy 0 <= a_i <= p_i");
  }
  if (s.n_pairs < 4) throw UsageError("need at least 4 matched sets");
  if (s.controls_per_case < 1) throw UsageError("each case needs >= 1 control");
  if (!(s.covariate_sd > 0.0) || !std::isfinite(s.covariate_sd)) {
    throw UsageError("covariate sd must be positive and finite");
  }
  if (!std::isfinite(s.b1) || !std::isfinite(s.b2)) {
    throw UsageError("effect sizes must be finite");
  }
}

// first `count` elements of a seeded shuffle of {0, ..., size-1}, ascending
std::vector<int> sample_without_replacement(Index size, int count, Rng& rng) {
  std::vector<int> all(static_cast<std::size_t>(size));
  std::iota(all.begin(), all.end(), 0);
  rng.shuffle(all);
  all.resize(static_cast<std::size_t>(count));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

GeneratedDataset generate_dataset(const SimulationSetting& setting) {
  check_setting(setting);
  Rng rng(setting.seed);

  const Index p = setting.p1 + setting.p2;
  const int members = setting.controls_per_case + 1;
  const Index rows = static_cast<Index>(setting.n_pairs) * members;

  GeneratedDataset out;
  out.true_beta = Eigen::VectorXd::Zero(p);
  for (int j : sample_without_replacement(setting.p1, setting.a1, rng)) {
    out.true_beta[j] = setting.b1;
    out.active.push_back(j);
  }
  for (int j : sample_without_replacement(setting.p2, setting.a2, rng)) {
    out.true_beta[setting.p1 + j] = setting.b2;
    out.active.push_back(static_cast<int>(setting.p1) + j);
  }
  std::sort(out.active.begin(), out.active.end());

  Eigen::MatrixXd x(rows, p);
  for (Index r = 0; r < rows; ++r) {
    for (Index j = 0; j < p; ++j) {
      x(r, j) = setting.covariate_sd * rng.normal();
    }
  }

  std::vector<std::string> labels(static_cast<std::size_t>(rows));
  std::vector<std::uint8_t> is_case(static_cast<std::size_t>(rows), 0);
  Eigen::VectorXd eta(members);
  for (int s = 0; s < setting.n_pairs; ++s) {
    const Index first = static_cast<Index>(s) * members;
    const std::string id = "s" + std::to_string(s + 1);
    for (int m = 0; m < members; ++m) {
      labels[static_cast<std::size_t>(first + m)] = id;
      eta[m] = x.row(first + m).dot(out.true_beta);
    }
    // case index ~ softmax(eta) within the stratum
    const double max_eta = eta.maxCoeff();
    Eigen::VectorXd w = (eta.array() - max_eta).exp();
    w /= w.sum();
    const double u = rng.uniform01();
    double cum = 0.0;
    int pick = members - 1;
    for (int m = 0; m < members; ++m) {
      cum += w[m];
      if (u < cum) {
        pick = m;
        break;
      }
    }
    is_case[static_cast<std::size_t>(first + pick)] = 1;
  }

  out.data = MatchedDataset(std::move(x), std::move(labels), std::move(is_case),
                            {setting.p1, setting.p2});
  return out;
}

std::pair<double, double> evaluate_selection(const std::vector<int>& selected,
                                             const std::vector<int>& truth,
                                             Index p) {
  auto check_range = [p](const std::vector<int>& v, const char* what) {
    for (int j : v) {
      if (j < 0 || j >= p) {
        throw UsageError(std::string(what) + " index " + std::to_string(j) +
                         " is out of range");
      }
    }
  };
  check_range(selected, "selected");
  check_range(truth, "truth");

  const std::unordered_set<int> truth_set(truth.begin(), truth.end());
  std::size_t hits = 0;
  for (int j : selected) hits += truth_set.count(j);

  const double power =
      truth_set.empty() ? 0.0
                        : static_cast<double>(hits) /
                              static_cast<double>(truth_set.size());
  const double fdr =
      selected.empty() ? 0.0
                       : static_cast<double>(selected.size() - hits) /
                             static_cast<double>(selected.size());
  return {power, fdr};
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 7; ++i) grid.push_back(0.55 + 0.05 * i);
  return grid;
}

StudyReport run_study(const std::vector<SimulationSetting>& settings,
                      int replicates, const std::vector<double>& thresholds,
                      const StudyConfig& config, std::uint64_t master_seed) {
  if (settings.empty()) throw UsageError("no settings supplied");
  if (replicates < 1) throw UsageError("replicates must be >= 1");
  if (thresholds.empty()) throw UsageError("threshold grid is empty");
  for (double t : thresholds) {
    if (!(t > 0.0) || !(t < 1.0)) {
      throw UsageError("thresholds must lie in (0, 1)");
    }
  }

  StudyReport report;
  report.thresholds = thresholds;
  report.seed = master_seed;
  const int n_tasks = static_cast<int>(settings.size()) * replicates;
  report.replicates.assign(static_cast<std::size_t>(n_tasks), {});

  parallel_for(n_tasks, config.workers, [&](int task) {
    const int si = task / replicates;
    const int rep = task % replicates;
    ReplicateOutcome& out = report.replicates[static_cast<std::size_t>(task)];
    out.setting = si + 1;
    out.replicate = rep;

    const std::uint64_t rep_seed = derive_seed(
        master_seed,
        static_cast<std::uint64_t>(si) * 1000003ULL + static_cast<std::uint64_t>(rep));
    try {
      SimulationSetting setting = settings[static_cast<std::size_t>(si)];
      setting.seed = derive_seed(rep_seed, 1);
      const GeneratedDataset gen = generate_dataset(setting);
      out.truth = gen.active;

      const CvPlan plan =
          make_cv_plan(gen.data, config.n_folds, derive_seed(rep_seed, 2));
      const PenaltyFactorsResult pf_result =
          default_pf(gen.data, config.alpha, config.type_step1, plan,
                     config.solver, config.pf_cap, 1);
      out.pf = pf_result.pf.pf;

      const auto grid = default_lambda_grid(gen.data, pf_result.pf, config.alpha,
                                            config.solver.standardize);
      const auto search = find_default_lambda(gen.data, pf_result.pf,
                                              config.alpha, grid, plan,
                                              config.solver, 1);
      out.lambda1 = search.lambda1;

      StabilityConfig stab;
      stab.lambda_list = {search.lambda1 * pf_result.pf.pf};
      stab.alpha = config.alpha;
      stab.B = config.B;
      stab.seed = derive_seed(rep_seed, 3);
      stab.workers = 1;
      stab.solver = config.solver;
      const StabilityResult stab_result = stability_selection(gen.data, stab);

      out.selected_per_threshold.reserve(thresholds.size());
      for (double t : thresholds) {
        out.selected_per_threshold.push_back(select_variables(stab_result, t));
      }
      const auto [power, fdr] = evaluate_selection(
          select_variables(stab_result, config.threshold), gen.active,
          gen.data.n_covariates());
      out.power = power;
      out.fdr = fdr;
    } catch (const std::exception& err) {
      out.failed = true;
      out.error = err.what();
    }
  });

  int successes = 0;
  for (std::size_t si = 0; si < settings.size(); ++si) {
    SettingSummary summary;
    summary.setting = static_cast<int>(si) + 1;
    summary.sweep_power.assign(thresholds.size(), 0.0);
    summary.sweep_fdr.assign(thresholds.size(), 0.0);
    const Index p = settings[si].p1 + settings[si].p2;

    for (int rep = 0; rep < replicates; ++rep) {
      const ReplicateOutcome& out =
          report.replicates[si * static_cast<std::size_t>(replicates) +
                            static_cast<std::size_t>(rep)];
      if (out.failed) {
        ++summary.failures;
        continue;
      }
      ++summary.replicates;
      summary.power += out.power;
      summary.fdr += out.fdr;
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        const auto [pw, fd] =
            evaluate_selection(out.selected_per_threshold[t], out.truth, p);
        summary.sweep_power[t] += pw;
        summary.sweep_fdr[t] += fd;
      }
    }
    if (summary.replicates > 0) {
      const double denom = summary.replicates;
      summary.power /= denom;
      summary.fdr /= denom;
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        summary.sweep_power[t] /= denom;
        summary.sweep_fdr[t] /= denom;
      }
    }
    successes += summary.replicates;
    report.settings.push_back(std::move(summary));
  }

  if (successes == 0) {
    std::string detail;
    for (const auto& r : report.replicates) {
      if (r.failed) {
        detail = r.error;
        break;
      }
    }
    throw NumericalError("every replicate failed; first error: " + detail);
  }
  return report;
}

}  // namespace penclr
