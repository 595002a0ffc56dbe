#include "perflab/risk.hpp"

#include <cmath>

namespace perflab {

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const Vector& v) {
  const auto n = static_cast<double>(v.size());
  MeanSe out;
  out.mean = v.mean();
  if (v.size() > 1) {
    const double var = (v.array() - out.mean).square().sum() / (n - 1.0);
    out.se = std::sqrt(var / n);
  }
  return out;
}

Vector column_se(const Matrix& rows) {
  Vector se(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) se[j] = mean_se(rows.col(j)).se;
  return se;
}

// Closed forms for the Gaussian location map with squared_ridge.
double closed_dpr(const Instance& inst, const Theta& theta1, const Theta& theta2) {
  const auto mc = closed_form_mean_cov(inst.map, theta1);
  return (theta2 - mc.mean).squaredNorm() + mc.variance.sum() + 0.5 * inst.loss.lambda * theta2.squaredNorm();
}

Vector closed_dpr_grad(const Instance& inst, const Theta& theta1, const Theta& theta2) {
  const auto mc = closed_form_mean_cov(inst.map, theta1);
  return 2.0 * (theta2 - mc.mean) + inst.loss.lambda * theta2;
}

void check_theta(const Instance& inst, const Theta& theta, const char* what) {
  if (static_cast<std::size_t>(theta.size()) != inst.dim()) {
    throw ContractError(std::string(what) + ": theta has the wrong dimension");
  }
  if (!theta.allFinite()) throw ContractError(std::string(what) + ": theta must be finite");
}

// Score of every row as an n x d matrix.
Matrix score_rows(const DistMapSpec& map, const Matrix& points, const Theta& theta) {
  const Vector mean = map.base_mean + map.shift * theta;
  const Vector inv_var = map.sigma.cwiseAbs2().cwiseInverse();
  return ((points.rowwise() - mean.transpose()) * inv_var.asDiagonal()) * map.shift;
}

}  // namespace

bool supports_closed_form(const Instance& inst) {
  return inst.map.kind == MapKind::gaussian_location_scale && inst.loss.kind == LossKind::squared_ridge;
}

void require_mode(const Instance& inst, const EvalOptions& opts) {
  if (opts.mode == EvalMode::closed_form && !supports_closed_form(inst)) {
    throw UnsupportedError("closed-form evaluation needs a gaussian_location_scale map with squared_ridge loss");
  }
  if (opts.mode == EvalMode::monte_carlo && opts.n == 0) throw ContractError("Monte Carlo evaluation needs n >= 1");
}

RiskEstimate dpr(const Instance& inst, const Theta& theta1, const Theta& theta2, const EvalOptions& opts) {
  check_theta(inst, theta1, "dpr");
  check_theta(inst, theta2, "dpr");
  require_mode(inst, opts);
  if (opts.mode == EvalMode::closed_form) return {closed_dpr(inst, theta1, theta2), 0.0, 0, EvalMode::closed_form};
  const auto batch = sample(inst.map, theta1, opts.n, opts.seed);
  const auto stats = mean_se(loss_values(inst.loss, batch.points, theta2));
  return {stats.mean, stats.se, opts.n, EvalMode::monte_carlo};
}

RiskEstimate pr(const Instance& inst, const Theta& theta, const EvalOptions& opts) {
  return dpr(inst, theta, theta, opts);
}

RiskEstimate subopt_gap(const Instance& inst, const Theta& theta, const Theta& theta_prime, const EvalOptions& opts) {
  check_theta(inst, theta, "subopt_gap");
  check_theta(inst, theta_prime, "subopt_gap");
  require_mode(inst, opts);
  if (opts.mode == EvalMode::closed_form) {
    return {closed_dpr(inst, theta, theta_prime) - closed_dpr(inst, theta, theta), 0.0, 0, EvalMode::closed_form};
  }
  const auto batch = sample(inst.map, theta, opts.n, opts.seed);
  const Vector diff = loss_values(inst.loss, batch.points, theta_prime) - loss_values(inst.loss, batch.points, theta);
  const auto stats = mean_se(diff);
  return {stats.mean, stats.se, opts.n, EvalMode::monte_carlo};
}

DprGradient dpr_gradient(const Instance& inst, const Theta& theta1, const Theta& theta2, const EvalOptions& opts) {
  check_theta(inst, theta1, "dpr_gradient");
  check_theta(inst, theta2, "dpr_gradient");
  require_mode(inst, opts);
  if (opts.mode == EvalMode::closed_form) {
    return {closed_dpr_grad(inst, theta1, theta2), Vector::Zero(theta2.size())};
  }
  const auto batch = sample(inst.map, theta1, opts.n, opts.seed);
  const Matrix rows = grad_theta_rows(inst.loss, batch.points, theta2);
  return {rows.colwise().mean().transpose(), column_se(rows)};
}

GradEstimate performative_gradient(const Instance& inst, const Theta& theta, const EvalOptions& opts) {
  check_theta(inst, theta, "performative_gradient");
  require_mode(inst, opts);
  const auto d = theta.size();
  GradEstimate out;
  out.mode = opts.mode;

  if (opts.mode == EvalMode::closed_form) {
    const auto mc = closed_form_mean_cov(inst.map, theta);
    out.grad1 = 2.0 * (theta - mc.mean) + inst.loss.lambda * theta;
    // E[l * score] for a Gaussian location family; third moments vanish
    out.grad2 = -2.0 * inst.map.shift.transpose() * (theta - mc.mean);
    out.total = out.grad1 + out.grad2;
    out.std_err = Vector::Zero(d);
    return out;
  }

  out.n = opts.n;
  const auto batch = sample(inst.map, theta, opts.n, opts.seed);
  const Matrix g1 = grad_theta_rows(inst.loss, batch.points, theta);
  out.grad1 = g1.colwise().mean().transpose();

  if (inst.map.has_density()) {
    const Vector values = loss_values(inst.loss, batch.points, theta);
    const Matrix g2 = score_rows(inst.map, batch.points, theta).array().colwise() * values.array();
    out.grad2 = g2.colwise().mean().transpose();
    out.total = out.grad1 + out.grad2;
    out.std_err = column_se(g1 + g2);
    return out;
  }

  // No density: differentiate DPR in its distribution slot under common random numbers.
  constexpr double h = 1e-3;
  out.grad2_fallback = true;
  out.grad2.resize(d);
  Matrix per_sample(static_cast<Eigen::Index>(opts.n), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Theta up = theta;
    Theta down = theta;
    up[j] += h;
    down[j] -= h;
    const auto b_up = sample(inst.map, up, opts.n, opts.seed);
    const auto b_down = sample(inst.map, down, opts.n, opts.seed);
    per_sample.col(j) =
        (loss_values(inst.loss, b_up.points, theta) - loss_values(inst.loss, b_down.points, theta)) / (2.0 * h);
    out.grad2[j] = per_sample.col(j).mean();
  }
  out.total = out.grad1 + out.grad2;
  out.std_err = column_se(g1 + per_sample);
  return out;
}

Vector finite_difference_pr(const Instance& inst, const Theta& theta, double h, const EvalOptions& opts) {
  check_theta(inst, theta, "finite_difference_pr");
  if (!(h > 0.0)) throw ContractError("finite_difference_pr: step must be positive");
  Vector g(theta.size());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    Theta up = theta;
    Theta down = theta;
    up[j] += h;
    down[j] -= h;
    g[j] = (pr(inst, up, opts).value - pr(inst, down, opts).value) / (2.0 * h);
  }
  return g;
}

FrozenDpr::FrozenDpr(const Instance& inst, Theta theta_env, const EvalOptions& opts)
    : inst_(inst), env_(std::move(theta_env)), mode_(opts.mode) {
  check_theta(inst, env_, "FrozenDpr");
  require_mode(inst, opts);
  if (mode_ == EvalMode::monte_carlo) points_ = sample(inst.map, env_, opts.n, opts.seed).points;
}

double FrozenDpr::value(const Theta& theta) const {
  if (mode_ == EvalMode::closed_form) return closed_dpr(inst_, env_, theta);
  return loss_values(inst_.loss, points_, theta).mean();
}

Vector FrozenDpr::gradient(const Theta& theta) const {
  if (mode_ == EvalMode::closed_form) return closed_dpr_grad(inst_, env_, theta);
  return grad_theta_rows(inst_.loss, points_, theta).colwise().mean().transpose();
}

double FrozenDpr::value_std_err(const Theta& theta) const {
  if (mode_ == EvalMode::closed_form) return 0.0;
  return mean_se(loss_values(inst_.loss, points_, theta)).se;
}

}  // namespace perflab
