#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "penclr/likelihood.hpp"
#include "penclr/rng.hpp"
#include "penclr/solver.hpp"
#include "penclr/types.hpp"

// Shared builders and independent oracles. The oracles below deliberately
// avoid the library's stabilized code paths: plain exp/log sums in long
// double, finite differences, exhaustive/bisection searches.
namespace helpers {

// strata[s][member][col]; member 0 is the case
inline penclr::MatchedDataset dataset_from(
    const std::vector<std::vector<std::vector<double>>>& strata,
    std::vector<penclr::Index> block_sizes = {}) {
  std::size_t rows = 0;
  for (const auto& s : strata) rows += s.size();
  const auto p = static_cast<penclr::Index>(strata.front().front().size());
  Eigen::MatrixXd x(static_cast<penclr::Index>(rows), p);
  std::vector<std::string> labels;
  std::vector<std::uint8_t> cases;
  penclr::Index r = 0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    for (std::size_t m = 0; m < strata[s].size(); ++m) {
      for (penclr::Index j = 0; j < p; ++j) {
        x(r, j) = strata[s][m][static_cast<std::size_t>(j)];
      }
      labels.push_back("s" + std::to_string(s + 1));
      cases.push_back(m == 0 ? 1 : 0);
      ++r;
    }
  }
  if (block_sizes.empty()) block_sizes = {p};
  return penclr::MatchedDataset(std::move(x), std::move(labels),
                                std::move(cases), std::move(block_sizes));
}

// n strata of 1 case + k controls, iid standard normal covariates, the case
// position chosen uniformly
inline penclr::MatchedDataset random_dataset(int n, int k, int p,
                                             std::uint64_t seed,
                                             std::vector<penclr::Index> blocks = {}) {
  penclr::Rng rng(seed);
  std::vector<std::vector<std::vector<double>>> strata;
  for (int s = 0; s < n; ++s) {
    std::vector<std::vector<double>> members(
        static_cast<std::size_t>(k) + 1,
        std::vector<double>(static_cast<std::size_t>(p)));
    for (auto& row : members) {
      for (auto& cell : row) cell = rng.normal();
    }
    const auto case_pos = rng.below(static_cast<std::uint64_t>(k) + 1);
    std::swap(members[0], members[case_pos]);
    strata.push_back(std::move(members));
  }
  return dataset_from(strata, std::move(blocks));
}

// n 1:1 strata where the case is shifted upward along the first `actives`
// columns; the remaining columns are pure noise
inline penclr::MatchedDataset signal_dataset(int n, int p, std::uint64_t seed,
                                             int actives = 1,
                                             double shift = 1.5,
                                             std::vector<penclr::Index> blocks = {}) {
  penclr::Rng rng(seed);
  std::vector<std::vector<std::vector<double>>> strata;
  for (int s = 0; s < n; ++s) {
    std::vector<double> case_row(static_cast<std::size_t>(p));
    std::vector<double> control_row(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
      case_row[static_cast<std::size_t>(j)] = rng.normal();
      control_row[static_cast<std::size_t>(j)] = rng.normal();
    }
    for (int j = 0; j < actives && j < p; ++j) {
      case_row[static_cast<std::size_t>(j)] += shift;
    }
    strata.push_back({case_row, control_row});
  }
  return dataset_from(strata, std::move(blocks));
}

// direct softmax evaluation in long double, no log-sum-exp shift
inline long double nll_direct(const penclr::MatchedDataset& data,
                              const Eigen::VectorXd& beta) {
  long double total = 0.0L;
  for (const auto& s : data.strata()) {
    auto eta = [&](penclr::Index row) {
      long double v = 0.0L;
      for (penclr::Index j = 0; j < data.n_covariates(); ++j) {
        v += static_cast<long double>(data.covariates()(row, j)) *
             static_cast<long double>(beta[j]);
      }
      return v;
    };
    const long double eta_case = eta(s.case_row());
    long double denom = std::exp(eta_case);
    for (penclr::Index r : s.control_rows) denom += std::exp(eta(r));
    total += std::log(denom) - eta_case;
  }
  return total;
}

// central finite differences of the library's neg_log_likelihood
inline Eigen::VectorXd fd_gradient(const Eigen::VectorXd& beta,
                                   const penclr::MatchedDataset& data,
                                   double h = 1e-5) {
  Eigen::VectorXd out(beta.size());
  Eigen::VectorXd probe = beta;
  for (penclr::Index j = 0; j < beta.size(); ++j) {
    probe[j] = beta[j] + h;
    const double up = penclr::neg_log_likelihood(probe, data);
    probe[j] = beta[j] - h;
    const double down = penclr::neg_log_likelihood(probe, data);
    probe[j] = beta[j];
    out[j] = (up - down) / (2.0 * h);
  }
  return out;
}

inline long double penalty_direct(const penclr::MatchedDataset& data,
                                  const penclr::PenaltySpec& spec,
                                  const Eigen::VectorXd& beta) {
  long double total = 0.0L;
  const auto block = data.block_of_column();
  for (penclr::Index j = 0; j < beta.size(); ++j) {
    const long double lam = spec.lambda[block[static_cast<std::size_t>(j)]];
    const long double b = beta[j];
    total += lam * (spec.alpha * std::fabs((double)b) +
                    0.5L * (1.0L - (long double)spec.alpha) * b * b);
  }
  return total;
}

// Grid minimization of nll + penalty over [lo, hi]^p down to `step`.
// p == 1 is exhaustive. p == 2 refines coarse-to-fine, which finds the global
// basin because the objective is convex (the convexity probe is its own test).
inline double grid_oracle_min(const penclr::MatchedDataset& data,
                              const penclr::PenaltySpec& spec, double lo,
                              double hi, double step) {
  const auto p = data.n_covariates();
  auto value = [&](double b1, double b2) {
    Eigen::VectorXd beta(p);
    beta[0] = b1;
    if (p > 1) beta[1] = b2;
    return static_cast<double>(nll_direct(data, beta) +
                               penalty_direct(data, spec, beta));
  };

  if (p == 1) {
    double best = value(lo, 0.0);
    for (double b = lo; b <= hi; b += step) best = std::min(best, value(b, 0.0));
    return best;
  }

  double c1 = 0.5 * (lo + hi), c2 = c1;
  double span = 0.5 * (hi - lo);
  double coarse = span / 50.0;
  double best = value(c1, c2);
  while (true) {
    double best1 = c1, best2 = c2;
    for (double b1 = c1 - span; b1 <= c1 + span + 1e-15; b1 += coarse) {
      for (double b2 = c2 - span; b2 <= c2 + span + 1e-15; b2 += coarse) {
        const double v = value(b1, b2);
        if (v < best) {
          best = v;
          best1 = b1;
          best2 = b2;
        }
      }
    }
    c1 = best1;
    c2 = best2;
    if (coarse <= step) break;
    span = 3.0 * coarse;
    coarse = std::max(step, coarse / 10.0);
  }
  return best;
}

// one-dimensional MLE: bisection on the score of the direct likelihood
inline double bisect_mle(const penclr::MatchedDataset& data, double lo,
                         double hi, double tol = 1e-12) {
  auto score = [&](double b) {
    Eigen::VectorXd beta(1);
    const double h = 1e-7;
    beta[0] = b + h;
    const long double up = nll_direct(data, beta);
    beta[0] = b - h;
    const long double down = nll_direct(data, beta);
    return static_cast<double>((up - down) / (2.0L * h));
  };
  double flo = score(lo), fhi = score(hi);
  if (flo * fhi > 0.0) throw std::runtime_error("bisection bracket is invalid");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = score(mid);
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace helpers
