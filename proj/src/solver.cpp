#include "penclr/solver.hpp"

#include <algorithm>
#include <cmath>

#include "penclr/errors.hpp"
#include "penclr/likelihood.hpp"

namespace penclr {

namespace {

// soft threshold, elementwise: sign(v) * max(|v| - t, 0)
inline double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

struct Objective {
  const Eigen::MatrixXd& design;
  const std::vector<Stratum>& strata;
  const Eigen::VectorXd& l1;  // per-column L1 weight
  const Eigen::VectorXd& l2;  // per-column ridge weight

  // likelihood plus ridge
  double smooth(const Eigen::VectorXd& beta) const {
    return neg_log_likelihood(design, strata, beta) +
           0.5 * l2.cwiseProduct(beta).dot(beta);
  }

  double smooth_and_grad(const Eigen::VectorXd& beta, Eigen::VectorXd& grad) const {
    const double nll = value_and_gradient(design, strata, beta, grad);
    grad += l2.cwiseProduct(beta);
    return nll + 0.5 * l2.cwiseProduct(beta).dot(beta);
  }

  double nonsmooth(const Eigen::VectorXd& beta) const {
    return l1.dot(beta.cwiseAbs());
  }
};

// prox-gradient candidate from point y with step 1/L
void prox_step(const Eigen::VectorXd& y, const Eigen::VectorXd& grad, double L,
               const Eigen::VectorXd& l1, Eigen::VectorXd& out) {
  const double step = 1.0 / L;
  for (Index j = 0; j < y.size(); ++j) {
    out[j] = soft(y[j] - step * grad[j], step * l1[j]);
  }
}

// backtracking: doubles L until the quadratic majorization at `at` holds
double backtracked_prox(const Objective& obj, const Eigen::VectorXd& at,
                        double f_at, const Eigen::VectorXd& grad, double& L,
                        Eigen::VectorXd& cand) {
  constexpr int kMaxDoublings = 120;
  double f_cand = 0.0;
  for (int bt = 0;; ++bt) {
    prox_step(at, grad, L, obj.l1, cand);
    const Eigen::VectorXd d = cand - at;
    f_cand = obj.smooth(cand);
    const double bound =
        f_at + grad.dot(d) + 0.5 * L * d.squaredNorm() + 1e-12 * std::abs(f_at);
    if (f_cand <= bound || bt >= kMaxDoublings) break;
    L *= 2.0;
  }
  return f_cand;
}

// per-column penalty weights on the scale the solver works on
void penalty_weights(const MatchedDataset& data, const PenaltySpec& spec,
                     Eigen::VectorXd& l1, Eigen::VectorXd& l2) {
  const std::vector<int> block = data.block_of_column();
  const Index p = data.n_covariates();
  l1.resize(p);
  l2.resize(p);
  for (Index j = 0; j < p; ++j) {
    const bool exempt =
        !spec.unpenalized.empty() && spec.unpenalized[static_cast<std::size_t>(j)];
    const double level = exempt ? 0.0 : spec.lambda[block[static_cast<std::size_t>(j)]];
    l1[j] = level * spec.alpha;
    l2[j] = level * (1.0 - spec.alpha);
  }
}

Standardization standardize(const Eigen::MatrixXd& x, Eigen::MatrixXd& out,
                            std::vector<std::string>& warnings,
                            const std::vector<std::string>& names) {
  Standardization rec;
  rec.applied = true;
  const Index n = x.rows(), p = x.cols();
  rec.center = x.colwise().mean();
  rec.scale.resize(p);
  out.resize(n, p);
  for (Index j = 0; j < p; ++j) {
    out.col(j) = x.col(j).array() - rec.center[j];
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(n));
    if (sd > 0.0) {
      rec.scale[j] = sd;
      out.col(j) /= sd;
    } else {
      // constant column: centered to zero, so its coefficient stays 0
      rec.scale[j] = 1.0;
      warnings.push_back("column '" + names[static_cast<std::size_t>(j)] +
                         "' is constant; its coefficient is fixed at 0");
    }
  }
  return rec;
}

double initial_step_bound(const Eigen::MatrixXd& x, const Eigen::VectorXd& l2) {
  // rough curvature guess; backtracking corrects an underestimate
  const double avg_row = x.squaredNorm() / std::max<double>(1.0, x.rows());
  const double ridge = l2.size() ? l2.maxCoeff() : 0.0;
  return std::max(1e-3, 0.5 * avg_row + ridge);
}

}  // namespace

void PenaltySpec::check(const MatchedDataset& data) const {
  if (lambda.size() != data.n_blocks()) {
    throw UsageError("penalty vector has " + std::to_string(lambda.size()) +
                     " entries but the data declares " +
                     std::to_string(data.n_blocks()) + " blocks");
  }
  for (Index b = 0; b < lambda.size(); ++b) {
    if (!(lambda[b] >= 0.0) || !std::isfinite(lambda[b])) {
      throw UsageError("penalty level for block " + std::to_string(b + 1) +
                       " must be finite and >= 0");
    }
  }
  if (!(alpha > 0.0) || alpha > 1.0) {
    throw UsageError("alpha must lie in (0, 1]");
  }
  if (!unpenalized.empty() &&
      unpenalized.size() != static_cast<std::size_t>(data.n_covariates())) {
    throw UsageError("unpenalized mask length does not match the covariate count");
  }
}

double penalty_value(const Eigen::VectorXd& beta, const PenaltySpec& spec,
                     const std::vector<Index>& block_sizes) {
  Index p = 0;
  for (Index s : block_sizes) p += s;
  if (beta.size() != p) {
    throw std::invalid_argument("coefficient length does not match block sizes");
  }
  if (spec.lambda.size() != static_cast<Index>(block_sizes.size())) {
    throw std::invalid_argument("penalty vector length does not match block count");
  }
  double total = 0.0;
  Index j = 0;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    for (Index k = 0; k < block_sizes[b]; ++k, ++j) {
      const bool exempt =
          !spec.unpenalized.empty() && spec.unpenalized[static_cast<std::size_t>(j)];
      if (exempt) continue;
      total += spec.lambda[static_cast<Index>(b)] *
               (spec.alpha * std::abs(beta[j]) +
                0.5 * (1.0 - spec.alpha) * beta[j] * beta[j]);
    }
  }
  return total;
}

FitResult fit_penalized(const MatchedDataset& data, const PenaltySpec& spec,
                        const SolverOptions& options) {
  spec.check(data);
  const Index p = data.n_covariates();

  FitResult result;
  result.spec = spec;

  Eigen::MatrixXd design;
  if (options.standardize) {
    result.standardization = standardize(data.covariates(), design,
                                         result.warnings, data.column_names());
  } else {
    design = data.covariates();
    result.standardization.applied = false;
  }

  Eigen::VectorXd l1, l2;
  penalty_weights(data, spec, l1, l2);

  const Objective obj{design, data.strata(), l1, l2};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(p);  // current iterate
  Eigen::VectorXd y = x;                         // momentum point
  Eigen::VectorXd grad(p), cand(p);
  double t = 1.0;
  double obj_x = obj.smooth(x) + obj.nonsmooth(x);
  double L = initial_step_bound(design, l2);

  result.objective_history.reserve(static_cast<std::size_t>(options.max_iterations) + 1);
  result.objective_history.push_back(obj_x);

  bool converged = false;
  int iter = 0;
  for (iter = 1; iter <= options.max_iterations; ++iter) {
    double f_y = obj.smooth_and_grad(y, grad);
    double f_c = backtracked_prox(obj, y, f_y, grad, L, cand);
    double obj_c = f_c + obj.nonsmooth(cand);

    if (obj_c > obj_x) {
      // momentum overshoot: restart from the last accepted iterate
      t = 1.0;
      f_y = obj.smooth_and_grad(x, grad);
      f_c = backtracked_prox(obj, x, f_y, grad, L, cand);
      obj_c = f_c + obj.nonsmooth(cand);
      if (obj_c > obj_x) {
        // no further descent at numerical precision
        converged = (cand - x).lpNorm<Eigen::Infinity>() < options.coef_tol;
        break;
      }
    }

    const double step_inf = (cand - x).lpNorm<Eigen::Infinity>();
    const double rel_drop = (obj_x - obj_c) / std::max(1.0, std::abs(obj_x));

    const double t_next =
        options.accelerate ? 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)) : 1.0;
    y = cand + ((t - 1.0) / t_next) * (cand - x);
    x.swap(cand);
    obj_x = obj_c;
    t = t_next;
    result.objective_history.push_back(obj_x);

    if (rel_drop < options.objective_tol && step_inf < options.coef_tol) {
      converged = true;
      break;
    }
    L *= 0.97;  // slow step recovery; backtracking re-tightens when needed
  }

  result.iterations = std::min(iter, options.max_iterations);
  result.converged = converged;
  if (!converged) {
    result.diagnostic = "did not converge within " +
                        std::to_string(options.max_iterations) +
                        " iterations (last objective " + std::to_string(obj_x) + ")";
  }

  // back to the original covariate scale; exact zeros survive the division
  result.beta = options.standardize
                    ? (x.array() / result.standardization.scale.array()).matrix()
                    : x;
  for (Index j = 0; j < p; ++j) {
    if (result.beta[j] != 0.0) result.nonzero.push_back(static_cast<int>(j));
  }
  result.objective = neg_log_likelihood(result.beta, data) +
                     penalty_value(result.beta, spec, data.block_sizes());
  return result;
}

Eigen::VectorXd lambda_max_per_block(const MatchedDataset& data, double alpha,
                                     bool standardize_flag) {
  if (!(alpha > 0.0) || alpha > 1.0) throw UsageError("alpha must lie in (0, 1]");
  Eigen::MatrixXd design;
  if (standardize_flag) {
    std::vector<std::string> sink;
    standardize(data.covariates(), design, sink, data.column_names());
  } else {
    design = data.covariates();
  }
  Eigen::VectorXd grad(data.n_covariates());
  value_and_gradient(design, data.strata(),
                     Eigen::VectorXd::Zero(data.n_covariates()), grad);
  const std::vector<int> block = data.block_of_column();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(data.n_blocks());
  for (Index j = 0; j < grad.size(); ++j) {
    const int b = block[static_cast<std::size_t>(j)];
    out[b] = std::max(out[b], std::abs(grad[j]) / alpha);
  }
  return out;
}

KktReport kkt_check(const FitResult& fit, const MatchedDataset& data,
                    const PenaltySpec& spec, double tol) {
  spec.check(data);
  const Index p = data.n_covariates();
  if (fit.beta.size() != p) {
    throw std::invalid_argument("fit does not match the dataset dimensions");
  }

  // reconstruct the problem the fit was solved on
  Eigen::MatrixXd design;
  Eigen::VectorXd beta;
  if (fit.standardization.applied) {
    std::vector<std::string> sink;
    standardize(data.covariates(), design, sink, data.column_names());
    beta = fit.beta.cwiseProduct(fit.standardization.scale);
  } else {
    design = data.covariates();
    beta = fit.beta;
  }

  Eigen::VectorXd l1, l2;
  penalty_weights(data, spec, l1, l2);
  Eigen::VectorXd grad(p);
  value_and_gradient(design, data.strata(), beta, grad);

  KktReport report;
  for (Index j = 0; j < p; ++j) {
    const double g = grad[j] + l2[j] * beta[j];
    double margin;
    if (beta[j] != 0.0) {
      margin = std::abs(g + l1[j] * (beta[j] > 0.0 ? 1.0 : -1.0)) - tol;
    } else {
      margin = std::abs(g) - l1[j] - tol;
    }
    if (margin > 0.0) {
      report.violations.push_back(
          "variable " + std::to_string(j) + " violates the subgradient condition by " +
          std::to_string(margin));
      report.worst = std::max(report.worst, margin);
    }
  }
  return report;
}

}  // namespace penclr
