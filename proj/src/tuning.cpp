#include "penclr/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "penclr/errors.hpp"
#include "penclr/likelihood.hpp"
#include "penclr/parallel.hpp"
#include "penclr/rng.hpp"

namespace penclr {

namespace {

void check_plan(const MatchedDataset& data, const CvPlan& plan) {
  const int n = static_cast<int>(data.n_strata());
  if (plan.n_folds < 2 || plan.n_folds > n) {
    throw UsageError("fold count must lie in [2, number of strata]");
  }
  if (plan.fold_of_stratum.size() != static_cast<std::size_t>(n)) {
    throw UsageError("fold assignment length does not match the stratum count");
  }
  for (int f : plan.fold_of_stratum) {
    if (f < 0 || f >= plan.n_folds) throw UsageError("fold label out of range");
  }
}

void check_penalty_factors(const PenaltyFactors& pf, const MatchedDataset& data) {
  if (pf.pf.size() != data.n_blocks()) {
    throw UsageError("penalty factor length does not match the block count");
  }
  if (pf.pf.size() == 0 || pf.pf[0] != 1.0) {
    throw UsageError("penalty factors must start with 1 for the first block");
  }
  for (Index b = 0; b < pf.pf.size(); ++b) {
    if (!(pf.pf[b] > 0.0) || !std::isfinite(pf.pf[b])) {
      throw UsageError("penalty factors must be positive and finite");
    }
  }
}

}  // namespace

CvPlan make_cv_plan(const MatchedDataset& data, int n_folds, std::uint64_t seed) {
  const int n = static_cast<int>(data.n_strata());
  if (n_folds < 2 || n_folds > n) {
    throw UsageError("fold count must lie in [2, number of strata]");
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  CvPlan plan;
  plan.n_folds = n_folds;
  plan.fold_of_stratum.assign(static_cast<std::size_t>(n), -1);
  // earlier folds receive the remainder, so sizes differ by at most one
  const int base = n / n_folds, rem = n % n_folds;
  std::size_t pos = 0;
  for (int f = 0; f < n_folds; ++f) {
    const int size = base + (f < rem ? 1 : 0);
    for (int k = 0; k < size; ++k) {
      plan.fold_of_stratum[static_cast<std::size_t>(order[pos++])] = f;
    }
  }
  return plan;
}

double cv_deviance(const MatchedDataset& data, const PenaltySpec& spec,
                   const CvPlan& plan, const SolverOptions& options) {
  spec.check(data);
  check_plan(data, plan);
  const int n = static_cast<int>(data.n_strata());

  double total = 0.0;
  for (int f = 0; f < plan.n_folds; ++f) {
    std::vector<int> train, held_out;
    for (int s = 0; s < n; ++s) {
      (plan.fold_of_stratum[static_cast<std::size_t>(s)] == f ? held_out : train)
          .push_back(s);
    }
    if (held_out.empty()) continue;
    if (train.empty()) throw UsageError("a fold contains every stratum");

    const FitResult fit = fit_penalized(data.subset(train), spec, options);
    if (!fit.converged) {
      throw NumericalError("cross-validation fold " + std::to_string(f + 1) +
                           " training fit did not converge: " + fit.diagnostic);
    }
    total += 2.0 * neg_log_likelihood(fit.beta, data.subset(held_out));
  }
  return total;
}

LambdaSearch find_default_lambda(const MatchedDataset& data,
                                 const PenaltyFactors& pf, double alpha,
                                 const std::vector<double>& grid,
                                 const CvPlan& plan,
                                 const SolverOptions& options, int workers) {
  check_penalty_factors(pf, data);
  if (grid.empty()) throw UsageError("lambda grid is empty");
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw UsageError("lambda grid values must be positive and finite");
    }
  }

  LambdaSearch out;
  out.grid = grid;
  out.deviance.assign(grid.size(), 0.0);
  parallel_for(static_cast<int>(grid.size()), workers, [&](int i) {
    PenaltySpec spec;
    spec.lambda = grid[static_cast<std::size_t>(i)] * pf.pf;
    spec.alpha = alpha;
    out.deviance[static_cast<std::size_t>(i)] = cv_deviance(data, spec, plan, options);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool better = out.deviance[i] < out.deviance[best] ||
                        (out.deviance[i] == out.deviance[best] &&
                         grid[i] < grid[best]);
    if (better) best = i;
  }
  out.lambda1 = grid[best];
  return out;
}

std::vector<double> default_lambda_grid(const MatchedDataset& data,
                                        const PenaltyFactors& pf, double alpha,
                                        bool standardize, int n_points,
                                        double span) {
  check_penalty_factors(pf, data);
  if (n_points < 1) throw UsageError("grid needs at least one point");
  if (!(span > 1.0)) throw UsageError("grid span must exceed 1");

  const Eigen::VectorXd per_block = lambda_max_per_block(data, alpha, standardize);
  double lambda1_max = 0.0;
  for (Index b = 0; b < per_block.size(); ++b) {
    lambda1_max = std::max(lambda1_max, per_block[b] / pf.pf[b]);
  }
  if (!(lambda1_max > 0.0)) {
    throw NumericalError("gradient at zero vanishes; no usable lambda grid");
  }

  std::vector<double> grid(static_cast<std::size_t>(n_points));
  if (n_points == 1) {
    grid[0] = lambda1_max;
    return grid;
  }
  const double ratio = std::pow(1.0 / span, 1.0 / (n_points - 1));
  double v = lambda1_max;
  for (int i = 0; i < n_points; ++i, v *= ratio) {
    grid[static_cast<std::size_t>(i)] = v;
  }
  return grid;
}

PenaltyFactorsResult default_pf(const MatchedDataset& data, double alpha,
                                TentativeModel type_step1, const CvPlan& plan,
                                const SolverOptions& options, double pf_cap,
                                int workers) {
  check_plan(data, plan);
  if (!(pf_cap > 1.0)) throw UsageError("pf cap must exceed 1");
  const Index n_blocks = data.n_blocks();

  PenaltyFactorsResult out;
  out.mean_abs_coef = Eigen::VectorXd::Zero(n_blocks);

  if (type_step1 == TentativeModel::combined) {
    PenaltyFactors ones{Eigen::VectorXd::Ones(n_blocks)};
    const auto grid =
        default_lambda_grid(data, ones, alpha, options.standardize);
    const auto search =
        find_default_lambda(data, ones, alpha, grid, plan, options, workers);
    out.lambda1.push_back(search.lambda1);

    PenaltySpec spec;
    spec.lambda = search.lambda1 * ones.pf;
    spec.alpha = alpha;
    const FitResult fit = fit_penalized(data, spec, options);
    if (!fit.converged) {
      throw NumericalError("tentative model did not converge: " + fit.diagnostic);
    }
    const std::vector<int> block = data.block_of_column();
    for (Index j = 0; j < data.n_covariates(); ++j) {
      out.mean_abs_coef[block[static_cast<std::size_t>(j)]] += std::abs(fit.beta[j]);
    }
    for (Index b = 0; b < n_blocks; ++b) {
      out.mean_abs_coef[b] /= static_cast<double>(data.block_sizes()[b]);
    }
  } else {
    out.lambda1.assign(static_cast<std::size_t>(n_blocks), 0.0);
    parallel_for(static_cast<int>(n_blocks), workers, [&](int b) {
      const MatchedDataset sub = data.single_block(b);
      PenaltyFactors one{Eigen::VectorXd::Ones(1)};
      const auto grid = default_lambda_grid(sub, one, alpha, options.standardize);
      const auto search =
          find_default_lambda(sub, one, alpha, grid, plan, options, 1);
      out.lambda1[static_cast<std::size_t>(b)] = search.lambda1;

      PenaltySpec spec;
      spec.lambda = search.lambda1 * one.pf;
      spec.alpha = alpha;
      const FitResult fit = fit_penalized(sub, spec, options);
      if (!fit.converged) {
        throw NumericalError("tentative model for block " + std::to_string(b + 1) +
                             " did not converge: " + fit.diagnostic);
      }
      out.mean_abs_coef[b] =
          fit.beta.cwiseAbs().mean();
    });
  }

  if ((out.mean_abs_coef.array() == 0.0).all()) {
    throw NumericalError("no signal detected; penalty factors undefined");
  }

  out.pf.pf = Eigen::VectorXd::Ones(n_blocks);
  const double m1 = out.mean_abs_coef[0];
  for (Index b = 1; b < n_blocks; ++b) {
    const double mb = out.mean_abs_coef[b];
    double value;
    if (mb == 0.0) {
      value = pf_cap;
      out.warnings.push_back("block " + std::to_string(b + 1) +
                             ": tentative coefficients are all zero; penalty "
                             "factor capped at " +
                             std::to_string(pf_cap));
    } else {
      value = std::clamp(m1 / mb, 1.0 / pf_cap, pf_cap);
    }
    out.pf.pf[b] = value;
  }
  return out;
}

}  // namespace penclr
