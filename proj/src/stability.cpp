#include "penclr/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "penclr/errors.hpp"
#include "penclr/parallel.hpp"
#include "penclr/rng.hpp"

namespace penclr {

std::vector<SubsamplePair> draw_complementary_pairs(int n, int B,
                                                    std::uint64_t seed) {
  if (n < 4) {
    throw UsageError("need at least 4 strata to draw complementary half samples");
  }
  if (B < 1) throw UsageError("B must be >= 1");

  const int half = n / 2;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);

  std::vector<SubsamplePair> pairs;
  pairs.reserve(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    rng.shuffle(order);
    SubsamplePair pair;
    pair.half_a.assign(order.begin(), order.begin() + half);
    pair.half_b.assign(order.begin() + half, order.begin() + 2 * half);
    std::sort(pair.half_a.begin(), pair.half_a.end());
    std::sort(pair.half_b.begin(), pair.half_b.end());
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

StabilityResult stability_selection(const MatchedDataset& data,
                                    const StabilityConfig& config) {
  const Index p = data.n_covariates();
  const int s = static_cast<int>(config.lambda_list.size());
  if (s < 1) throw UsageError("lambda list is empty");
  for (const auto& v : config.lambda_list) {
    PenaltySpec probe{v, config.alpha, {}};
    probe.check(data);
  }
  if (config.B < 1) throw UsageError("B must be >= 1");

  // one schedule, generated up front and reused across every penalty vector
  const auto pairs = draw_complementary_pairs(static_cast<int>(data.n_strata()),
                                              config.B, config.seed);
  std::vector<const std::vector<int>*> halves;
  halves.reserve(2 * pairs.size());
  for (const auto& pair : pairs) {
    halves.push_back(&pair.half_a);
    halves.push_back(&pair.half_b);
  }
  const int n_halves = static_cast<int>(halves.size());
  const int n_tasks = s * n_halves;

  // per-fit slots keep the reduction independent of scheduling
  std::vector<std::vector<std::uint8_t>> selected(
      static_cast<std::size_t>(n_tasks));
  std::vector<std::uint8_t> converged(static_cast<std::size_t>(n_tasks), 0);

  parallel_for(n_tasks, config.workers, [&](int task) {
    const int v = task / n_halves;
    const int h = task % n_halves;
    const MatchedDataset sub = data.subset(*halves[static_cast<std::size_t>(h)]);
    PenaltySpec spec;
    spec.lambda = config.lambda_list[static_cast<std::size_t>(v)];
    spec.alpha = config.alpha;
    const FitResult fit = fit_penalized(sub, spec, config.solver);
    if (!fit.converged) return;
    converged[static_cast<std::size_t>(task)] = 1;
    auto& slot = selected[static_cast<std::size_t>(task)];
    slot.assign(static_cast<std::size_t>(p), 0);
    for (int j : fit.nonzero) slot[static_cast<std::size_t>(j)] = 1;
  });

  StabilityResult result;
  result.config = config;
  result.total_fits = n_tasks;
  result.per_grid_frequency = Eigen::MatrixXd::Zero(s, p);
  result.failures_per_vector.assign(static_cast<std::size_t>(s), 0);

  for (int v = 0; v < s; ++v) {
    int ok = 0;
    std::vector<int> counts(static_cast<std::size_t>(p), 0);
    for (int h = 0; h < n_halves; ++h) {
      const int task = v * n_halves + h;
      if (!converged[static_cast<std::size_t>(task)]) continue;
      ++ok;
      const auto& slot = selected[static_cast<std::size_t>(task)];
      for (Index j = 0; j < p; ++j) {
        counts[static_cast<std::size_t>(j)] += slot[static_cast<std::size_t>(j)];
      }
    }
    const int failures = n_halves - ok;
    result.failures_per_vector[static_cast<std::size_t>(v)] = failures;
    result.total_failures += failures;
    if (ok == 0) {
      throw NumericalError("every fit failed for penalty vector " +
                           std::to_string(v + 1));
    }
    if (10 * failures > n_halves) {
      result.warnings.push_back(
          "penalty vector " + std::to_string(v + 1) + ": " +
          std::to_string(failures) + " of " + std::to_string(n_halves) +
          " fits did not converge; its frequencies use the remaining fits");
    }
    for (Index j = 0; j < p; ++j) {
      result.per_grid_frequency(v, j) =
          static_cast<double>(counts[static_cast<std::size_t>(j)]) / ok;
    }
  }

  result.selection_probability = result.per_grid_frequency.colwise().maxCoeff();
  return result;
}

std::vector<int> select_variables(const StabilityResult& result,
                                  double threshold) {
  if (!(threshold > 0.0) || !(threshold < 1.0)) {
    throw UsageError("selection threshold must lie in (0, 1)");
  }
  std::vector<int> out;
  for (Index j = 0; j < result.selection_probability.size(); ++j) {
    if (result.selection_probability[j] >= threshold) {
      out.push_back(static_cast<int>(j));
    }
  }
  return out;
}

}  // namespace penclr
