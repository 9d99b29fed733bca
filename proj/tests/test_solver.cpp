#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "penclr/errors.hpp"
#include "penclr/likelihood.hpp"
#include "penclr/solver.hpp"

using namespace penclr;

namespace {

// the ten-pair integer toy problem; oracle minimum frozen from an independent
// continuous minimization cross-checked against the 1e-3 grid
MatchedDataset toy_problem() {
  return helpers::dataset_from({
      {{2, 0}, {0, 1}},  {{1, -1}, {0, 1}}, {{2, 1}, {-1, 1}},
      {{1, 0}, {0, 0}},  {{3, 2}, {1, 0}},  {{0, 0}, {-2, -1}},
      {{2, 1}, {0, 2}},  {{1, 0}, {-1, 1}}, {{1, -1}, {0, 0}},
      {{2, 1}, {0, 0}},
  });
}
constexpr double kToyOracleMin = 2.399617396329041;

PenaltySpec lasso(double level, Index blocks = 1) {
  PenaltySpec spec;
  spec.lambda = Eigen::VectorXd::Constant(blocks, level);
  spec.alpha = 1.0;
  return spec;
}

}  // namespace

TEST_CASE("penalty_value evaluates the per-block elastic net") {
  PenaltySpec spec = lasso(2.0);
  Eigen::VectorXd beta(2);
  beta << 1.0, -3.0;
  CHECK(penalty_value(Eigen::VectorXd::Zero(2), spec, {2}) == 0.0);
  CHECK(penalty_value(beta, spec, {2}) == doctest::Approx(8.0).epsilon(1e-15));

  spec.alpha = 0.5;
  Eigen::VectorXd one(1);
  one << 2.0;
  CHECK(penalty_value(one, spec, {1}) == doctest::Approx(4.0).epsilon(1e-15));

  CHECK_THROWS_AS(penalty_value(one, spec, {2}), std::invalid_argument);
}

TEST_CASE("a dominant penalty shrinks everything to exact zero") {
  auto data = helpers::random_dataset(12, 1, 6, 321, {3, 3});
  PenaltySpec spec = lasso(1e6, 2);
  const FitResult fit = fit_penalized(data, spec);
  CHECK(fit.converged);
  CHECK(fit.beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.nonzero.empty());
  CHECK(fit.objective == doctest::Approx(12.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("solver reaches the grid-oracle minimum on the toy problem") {
  auto data = toy_problem();
  PenaltySpec spec = lasso(1.0);
  SolverOptions opts;
  opts.standardize = false;

  const FitResult fit = fit_penalized(data, spec, opts);
  CHECK(fit.converged);
  CHECK(fit.objective <= kToyOracleMin + 1e-4);

  // the runtime oracle reproduces the frozen constant
  const double oracle = helpers::grid_oracle_min(data, spec, -5.0, 5.0, 1e-3);
  CHECK(oracle == doctest::Approx(kToyOracleMin).epsilon(1e-6));

  CHECK(kkt_check(fit, data, spec, 1e-4).ok());
  // the optimum keeps one coefficient at exactly zero
  CHECK(fit.beta[1] == 0.0);
  CHECK(fit.beta[0] == doctest::Approx(1.5989).epsilon(1e-2));
}

TEST_CASE("unpenalized single-coefficient fit matches the bisection MLE") {
  // deltas (case minus control): 1, -0.5, 2, 0.5, -1, 1.5
  auto data = helpers::dataset_from({
      {{1.0}, {0.0}}, {{-0.5}, {0.0}}, {{2.0}, {0.0}},
      {{0.5}, {0.0}}, {{-1.0}, {0.0}}, {{1.5}, {0.0}},
  });
  const double mle = helpers::bisect_mle(data, -10.0, 10.0);
  CHECK(mle == doctest::Approx(0.9441566333468341).epsilon(1e-9));

  PenaltySpec spec = lasso(0.0);
  SolverOptions opts;
  opts.coef_tol = 1e-9;
  opts.objective_tol = 1e-12;
  opts.max_iterations = 5000;
  const FitResult fit = fit_penalized(data, spec, opts);
  CHECK(fit.converged);
  CHECK(std::abs(fit.beta[0] - mle) <= 1e-6);
}

TEST_CASE("beta = 0 satisfies the certificate above lambda_max") {
  auto data = helpers::random_dataset(15, 2, 5, 777, {3, 2});
  for (double alpha : {1.0, 0.6}) {
    const Eigen::VectorXd lmax = lambda_max_per_block(data, alpha);
    PenaltySpec spec;
    spec.lambda = 1.05 * lmax;
    spec.alpha = alpha;
    const FitResult fit = fit_penalized(data, spec);
    CHECK(fit.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(kkt_check(fit, data, spec, 1e-4).ok());
  }
}

TEST_CASE("the certificate rejects a perturbed solution") {
  auto data = toy_problem();
  PenaltySpec spec = lasso(1.0);
  SolverOptions opts;
  opts.standardize = false;
  FitResult fit = fit_penalized(data, spec, opts);
  REQUIRE(kkt_check(fit, data, spec, 1e-4).ok());

  fit.beta[1] += 0.1;  // nudge a zero coefficient
  const KktReport report = kkt_check(fit, data, spec, 1e-4);
  CHECK(!report.ok());
  CHECK(report.worst > 0.0);
}

TEST_CASE("objective history is non-increasing") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto data = helpers::random_dataset(10, 1, 4, 600 + static_cast<std::uint64_t>(trial),
                                        {2, 2});
    PenaltySpec spec;
    spec.lambda = Eigen::VectorXd::Constant(2, 0.05 + rng.uniform01());
    spec.alpha = trial % 2 == 0 ? 1.0 : 0.6;
    const FitResult fit = fit_penalized(data, spec);
    REQUIRE(fit.objective_history.size() >= 1);
    for (std::size_t i = 1; i < fit.objective_history.size(); ++i) {
      CHECK(fit.objective_history[i] <= fit.objective_history[i - 1] + 1e-12);
    }
  }
}

TEST_CASE("twice lambda_max zeroes every block") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto data = helpers::random_dataset(10, 1, 6, 9000 + seed, {4, 2});
    const Eigen::VectorXd lmax = lambda_max_per_block(data, 1.0);
    PenaltySpec spec;
    spec.lambda = 2.0 * lmax;
    spec.alpha = 1.0;
    const FitResult fit = fit_penalized(data, spec);
    CHECK(fit.nonzero.empty());
  }
}

TEST_CASE("unpenalized estimates are scale equivariant") {
  auto base = helpers::dataset_from({
      {{1.0}, {0.0}}, {{-0.5}, {0.0}}, {{2.0}, {0.0}},
      {{0.5}, {0.0}}, {{-1.0}, {0.0}}, {{1.5}, {0.0}},
  });
  const double c = 3.7;
  Eigen::MatrixXd scaled_x = base.covariates() * c;
  MatchedDataset scaled(std::move(scaled_x), base.row_stratum(),
                        base.row_is_case(), base.block_sizes());

  SolverOptions opts;
  opts.coef_tol = 1e-9;
  opts.objective_tol = 1e-12;
  opts.max_iterations = 5000;
  const FitResult f1 = fit_penalized(base, lasso(0.0), opts);
  const FitResult f2 = fit_penalized(scaled, lasso(0.0), opts);
  CHECK(std::abs(f2.beta[0] - f1.beta[0] / c) <= 1e-6 * std::abs(f1.beta[0] / c));
}

TEST_CASE("solver output stays within the oracle bound on random instances") {
  Rng rng(12345);
  for (int trial = 0; trial < 8; ++trial) {
    const int p = trial % 2 == 0 ? 1 : 2;
    auto data = helpers::random_dataset(8, 1, p, 7100 + static_cast<std::uint64_t>(trial));
    PenaltySpec spec;
    spec.lambda = Eigen::VectorXd::Constant(1, 0.05 + 1.5 * rng.uniform01());
    spec.alpha = trial % 3 == 0 ? 0.6 : 1.0;
    SolverOptions opts;
    opts.standardize = false;

    const FitResult fit = fit_penalized(data, spec, opts);
    REQUIRE(fit.converged);
    const double oracle = helpers::grid_oracle_min(data, spec, -5.0, 5.0, 1e-3);
    CHECK(fit.objective <= oracle + 1e-4);
    CHECK(kkt_check(fit, data, spec, 1e-4).ok());
  }
}

TEST_CASE("kkt certificate holds on standardized fits too") {
  auto data = helpers::random_dataset(20, 1, 8, 4242, {5, 3});
  PenaltySpec spec;
  spec.lambda = Eigen::VectorXd::Constant(2, 0.8);
  spec.alpha = 0.7;
  const FitResult fit = fit_penalized(data, spec);  // standardize on
  REQUIRE(fit.converged);
  CHECK(fit.standardization.applied);
  CHECK(kkt_check(fit, data, spec, 1e-4).ok());
  // reported objective is consistent with its definition
  const double recomputed = neg_log_likelihood(fit.beta, data) +
                            penalty_value(fit.beta, spec, data.block_sizes());
  CHECK(fit.objective == doctest::Approx(recomputed).epsilon(1e-8));
}

TEST_CASE("non-convergence is reported, not hidden") {
  auto data = helpers::random_dataset(20, 1, 6, 31415, {3, 3});
  PenaltySpec spec = lasso(0.01, 2);
  SolverOptions opts;
  opts.max_iterations = 1;
  const FitResult fit = fit_penalized(data, spec, opts);
  CHECK(!fit.converged);
  CHECK(!fit.diagnostic.empty());
}

TEST_CASE("invalid penalty specifications are rejected") {
  auto data = helpers::random_dataset(5, 1, 4, 8, {2, 2});
  PenaltySpec bad_len = lasso(1.0, 3);
  CHECK_THROWS_AS(fit_penalized(data, bad_len), UsageError);

  PenaltySpec bad_alpha = lasso(1.0, 2);
  bad_alpha.alpha = 0.0;
  CHECK_THROWS_AS(fit_penalized(data, bad_alpha), UsageError);

  PenaltySpec negative = lasso(1.0, 2);
  negative.lambda[1] = -0.5;
  CHECK_THROWS_AS(fit_penalized(data, negative), UsageError);
}

TEST_CASE("constant columns are pinned at zero with a warning") {
  auto base = helpers::random_dataset(8, 1, 3, 999);
  Eigen::MatrixXd x = base.covariates();
  x.col(1).setConstant(2.5);
  MatchedDataset data(std::move(x), base.row_stratum(), base.row_is_case(), {3});

  const FitResult fit = fit_penalized(data, lasso(0.1));
  CHECK(fit.beta[1] == 0.0);
  bool warned = false;
  for (const auto& w : fit.warnings) {
    if (w.find("constant") != std::string::npos) warned = true;
  }
  CHECK(warned);
}

TEST_CASE("unpenalized mask exempts columns from shrinkage") {
  auto data = helpers::random_dataset(15, 1, 3, 2718);
  PenaltySpec spec = lasso(1e6);
  spec.unpenalized = {0, 1, 0};  // column 1 exempt
  const FitResult fit = fit_penalized(data, spec);
  CHECK(fit.beta[0] == 0.0);
  CHECK(fit.beta[2] == 0.0);
  // the exempt column is free to move
  CHECK(kkt_check(fit, data, spec, 1e-4).ok());
}
