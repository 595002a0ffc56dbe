#include "perflab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace perflab {

namespace {

void check_start(const Instance& inst, const Theta& theta, const char* what) {
  if (static_cast<std::size_t>(theta.size()) != inst.dim()) {
    throw ContractError(std::string(what) + ": starting point has the wrong dimension");
  }
  if (!theta.allFinite()) throw ContractError(std::string(what) + ": starting point must be finite");
}

// Unit-step projected gradient mapping, the stationarity measure on a box.
double mapping_norm(const Theta& x, const Vector& g, const Box& box) { return (x - project(x - g, box)).norm(); }

double step_mapping_norm(const Theta& x, const Vector& g, double step, const Box& box) {
  if (step <= 0.0) return g.norm();
  return (x - project(x - step * g, box)).norm() / step;
}

InnerResult minimise_frozen(const FrozenDpr& f, const Box& box, const Theta& init, double tol, std::size_t max_iters) {
  return minimise_projected([&](const Theta& x) { return f.value(x); }, [&](const Theta& x) { return f.gradient(x); },
                            box, init, tol, max_iters);
}

// Smallest diagonal entry of a central-difference Hessian of the frozen objective.
double curvature_probe(const FrozenDpr& f, const Theta& x) {
  constexpr double h = 1e-4;
  double curv = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Theta up = x;
    Theta down = x;
    up[j] += h;
    down[j] -= h;
    curv = std::min(curv, (f.gradient(up)[j] - f.gradient(down)[j]) / (2.0 * h));
  }
  return std::max(curv, 1e-6);
}

bool blew_up(const RiskEstimate& current, const RiskEstimate& first) {
  if (!std::isfinite(current.value)) return true;
  return first.value != 0.0 && std::abs(current.value) > 10.0 * std::abs(first.value);
}

enum class GradRule { repeated, performative };

Trajectory gradient_method(const Instance& inst, const Theta& theta0, double step, std::size_t max_iters,
                           const EvalOptions& opts, std::optional<double> tol, GradRule rule) {
  const char* name = rule == GradRule::repeated ? "rgd" : "pgd";
  check_start(inst, theta0, name);
  require_mode(inst, opts);
  if (!(step >= 0.0) || !std::isfinite(step)) throw ContractError(std::string(name) + ": step size must be >= 0");

  Trajectory traj;
  traj.method = rule == GradRule::repeated ? SolverMethod::RGD : SolverMethod::PGD;
  traj.step_size = step;
  Theta theta = project(theta0, inst.domain);

  for (std::size_t t = 0;; ++t) {
    const auto step_opts = opts.with_seed(opts.seed.child(t));
    Vector g;
    Vector se;
    if (rule == GradRule::repeated) {
      auto est = dpr_gradient(inst, theta, theta, step_opts);
      g = std::move(est.grad);
      se = std::move(est.std_err);
    } else {
      auto est = performative_gradient(inst, theta, step_opts);
      g = std::move(est.total);
      se = std::move(est.std_err);
    }
    const double gnorm = step_mapping_norm(theta, g, step, inst.domain);
    traj.iterates.push_back(theta);
    traj.pr_values.push_back(pr(inst, theta, step_opts));
    traj.grad_norms.push_back(gnorm);

    if (blew_up(traj.pr_values.back(), traj.pr_values.front())) {
      traj.stop_reason = StopReason::diverged;
      break;
    }
    const double threshold =
        tol ? *tol : (opts.mode == EvalMode::closed_form ? kClosedFormTol : 3.0 * se.norm());
    if (gnorm <= threshold) {
      traj.stop_reason = StopReason::converged;
      break;
    }
    if (t >= max_iters) {
      traj.stop_reason = StopReason::max_iters;
      break;
    }
    theta = project(theta - step * g, inst.domain);
  }
  return traj;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

std::string_view to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::RRM: return "rrm";
    case SolverMethod::RGD: return "rgd";
    case SolverMethod::PGD: return "pgd";
  }
  return "unknown";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::converged: return "converged";
    case StopReason::max_iters: return "max_iters";
    case StopReason::diverged: return "diverged";
  }
  return "unknown";
}

std::string_view to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::grid: return "grid";
    case OracleMethod::fixed_point: return "fixed_point";
    case OracleMethod::analytic: return "analytic";
  }
  return "unknown";
}

InnerResult minimise_projected(const std::function<double(const Theta&)>& value,
                               const std::function<Vector(const Theta&)>& gradient, const Box& box,
                               const Theta& init, double tol, std::size_t max_iters) {
  Theta x = project(init, box);
  const double f0 = value(x);
  if (!std::isfinite(f0)) throw DivergenceError("projected descent: objective is not finite at the starting point");
  Vector g = gradient(x);
  double t = 1.0;
  InnerResult out;
  for (std::size_t k = 0;; ++k) {
    out.iterations = k;
    out.grad_mapping_norm = mapping_norm(x, g, box);
    if (out.grad_mapping_norm <= tol || k >= max_iters) break;
    // Accept a step once the local gradient Lipschitz estimate is below 1/t.
    // Unlike a value-decrease test this stays usable when f differences
    // drop below rounding.
    t = std::min(2.0 * t, 1e6);
    Theta xn;
    Vector gn;
    for (int bt = 0; bt < 200; ++bt) {
      xn = project(x - t * g, box);
      gn = gradient(xn);
      if (gn.allFinite() && t * (gn - g).norm() <= (xn - x).norm()) break;
      t *= 0.5;
    }
    if ((xn - x).norm() == 0.0) break;
    const double fn = value(xn);
    if (!std::isfinite(fn) || (f0 > 0.0 && fn > 10.0 * f0)) {
      throw DivergenceError("projected descent: objective grew more than tenfold over its initial value");
    }
    x = std::move(xn);
    g = std::move(gn);
  }
  out.theta = std::move(x);
  return out;
}

InnerResult inner_argmin(const Instance& inst, const Theta& theta_env, const Theta& init, const EvalOptions& opts,
                         double tol, std::size_t max_iters) {
  check_start(inst, init, "inner_argmin");
  const FrozenDpr f(inst, theta_env, opts);
  return minimise_frozen(f, inst.domain, init, tol, max_iters);
}

Theta retraining_map(const Instance& inst, const Theta& theta, const EvalOptions& opts) {
  return inner_argmin(inst, theta, theta, opts).theta;
}

double default_step(const Instance& inst) {
  double beta = 0.0;
  if (inst.declared.beta) {
    beta = *inst.declared.beta;
  } else if (inst.loss.kind == LossKind::squared_ridge) {
    beta = 2.0;
  } else {
    EvalOptions probe;
    probe.n = 2000;
    const Box region = quantile_region(inst.map, inst.domain, 0.999, probe);
    beta = estimate_constants(inst.loss, inst.domain, region, 2000, SeedSpec{}).beta;
  }
  return 0.1 / (beta + inst.loss.lambda + 1.0);
}

Trajectory rrm(const Instance& inst, const Theta& theta0, std::size_t max_iters, const EvalOptions& opts,
               std::optional<double> tol) {
  check_start(inst, theta0, "rrm");
  require_mode(inst, opts);
  Trajectory traj;
  traj.method = SolverMethod::RRM;
  Theta theta = project(theta0, inst.domain);

  for (std::size_t t = 0;; ++t) {
    const auto step_opts = opts.with_seed(opts.seed.child(t));
    const FrozenDpr f(inst, theta, step_opts);
    traj.iterates.push_back(theta);
    // the frozen batch is a draw from D(theta), so it also estimates PR(theta)
    traj.pr_values.push_back({f.value(theta), f.value_std_err(theta), f.mode() == EvalMode::closed_form ? 0 : opts.n,
                              opts.mode});
    traj.grad_norms.push_back(f.gradient(theta).norm());

    if (blew_up(traj.pr_values.back(), traj.pr_values.front())) {
      traj.stop_reason = StopReason::diverged;
      break;
    }
    if (t >= max_iters) {
      traj.stop_reason = StopReason::max_iters;
      break;
    }
    const auto inner = minimise_frozen(f, inst.domain, theta, 1e-10, 10000);
    double threshold = kClosedFormTol;
    if (tol) {
      threshold = *tol;
    } else if (opts.mode == EvalMode::monte_carlo) {
      // three standard errors of the inner solution: gradient noise over curvature
      const auto grad_se = dpr_gradient(inst, theta, inner.theta, step_opts).std_err.norm();
      threshold = 3.0 * grad_se / curvature_probe(f, inner.theta);
    }
    const bool done = (inner.theta - theta).norm() <= threshold;
    theta = inner.theta;
    if (done) {
      const auto last_opts = opts.with_seed(opts.seed.child(t + 1));
      const FrozenDpr last(inst, theta, last_opts);
      traj.iterates.push_back(theta);
      traj.pr_values.push_back({last.value(theta), last.value_std_err(theta),
                                last.mode() == EvalMode::closed_form ? 0 : opts.n, opts.mode});
      traj.grad_norms.push_back(last.gradient(theta).norm());
      traj.stop_reason = StopReason::converged;
      break;
    }
  }
  return traj;
}

Trajectory rgd(const Instance& inst, const Theta& theta0, double step, std::size_t max_iters, const EvalOptions& opts,
               std::optional<double> tol) {
  return gradient_method(inst, theta0, step, max_iters, opts, tol, GradRule::repeated);
}

Trajectory pgd(const Instance& inst, const Theta& theta0, double step, std::size_t max_iters, const EvalOptions& opts,
               std::optional<double> tol) {
  return gradient_method(inst, theta0, step, max_iters, opts, tol, GradRule::performative);
}

std::vector<Theta> grid_points(const Box& box, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ContractError("grid_points: step must be positive");
  const auto d = static_cast<Eigen::Index>(box.dim());
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double lo = box.lower()[j];
    const double hi = box.upper()[j];
    const auto k_max = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9));
    auto& axis = axes[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k <= k_max; ++k) axis.push_back(std::min(lo + static_cast<double>(k) * h, hi));
    // close the axis at the upper face when h does not divide the width
    if (hi - axis.back() > 1e-9 * h) axis.push_back(hi);
    total *= axis.size();
    if (total > 50'000'000) throw ContractError("grid_points: grid is too large");
  }
  std::vector<Theta> out;
  out.reserve(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t c = 0; c < total; ++c) {
    Theta p(d);
    for (Eigen::Index j = 0; j < d; ++j) p[j] = axes[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    out.push_back(std::move(p));
    // last axis varies fastest
    for (Eigen::Index j = d - 1; j >= 0; --j) {
      auto& i = idx[static_cast<std::size_t>(j)];
      if (++i < axes[static_cast<std::size_t>(j)].size()) break;
      i = 0;
    }
  }
  return out;
}

OracleResult grid_oracle_po(const Instance& inst, double h, const EvalOptions& opts) {
  if (inst.dim() > 2) throw UnsupportedError("grid_oracle_po: the grid oracle is limited to d <= 2");
  require_mode(inst, opts);
  const auto points = grid_points(inst.domain, h);
  OracleResult best;
  best.method = OracleMethod::grid;
  best.grid_step = h;
  bool have = false;
  for (const auto& p : points) {
    const double v = pr(inst, p, opts).value;
    if (!have) {
      best.theta_star = p;
      best.objective = v;
      have = true;
      continue;
    }
    const double tie = 1e-12 * (1.0 + std::abs(best.objective));
    bool take = v < best.objective - tie;
    if (!take && std::abs(v - best.objective) <= tie) {
      const double pn = p.norm();
      const double bn = best.theta_star.norm();
      if (pn < bn) {
        take = true;
      } else if (pn == bn) {
        take = std::lexicographical_compare(p.data(), p.data() + p.size(), best.theta_star.data(),
                                            best.theta_star.data() + best.theta_star.size());
      }
    }
    if (take) {
      best.theta_star = p;
      best.objective = v;
    }
  }
  return best;
}

OracleResult fixed_point_oracle_ps(const Instance& inst, const EvalOptions& opts, double tol) {
  require_mode(inst, opts);
  // A single seed throughout makes the sampled retraining map deterministic.
  Theta theta = project(inst.domain.center(), inst.domain);
  std::vector<double> ratios;
  double prev_gap = 0.0;
  bool expanding = false;
  for (int it = 0; it < 500; ++it) {
    const Theta next = retraining_map(inst, theta, opts);
    const double gap = (next - theta).norm();
    if (prev_gap > 1e-8) ratios.push_back(gap / prev_gap);
    theta = next;
    if (gap <= 1e-13 * (1.0 + theta.norm())) break;
    if (ratios.size() >= 3 && std::all_of(ratios.end() - 3, ratios.end(), [](double r) { return r >= 1.0; })) {
      expanding = true;
      break;
    }
    prev_gap = gap;
  }

  OracleResult out;
  out.contraction_ratio = median(ratios);
  out.residual = (retraining_map(inst, theta, opts) - theta).norm();
  if (!expanding && out.contraction_ratio < 1.0 && out.residual <= tol) {
    out.method = OracleMethod::fixed_point;
    out.theta_star = theta;
    out.objective = pr(inst, theta, opts).value;
    return out;
  }

  if (inst.dim() > 2) {
    out.method = OracleMethod::fixed_point;
    out.theta_star = theta;
    out.objective = pr(inst, theta, opts).value;
    out.conclusive = false;
    return out;
  }
  // Not a contraction here: scan the box for the smallest residual.
  const double h = inst.domain.diameter() / (inst.dim() == 1 ? 200.0 : 40.0);
  out.method = OracleMethod::grid;
  out.grid_step = h;
  out.residual = std::numeric_limits<double>::infinity();
  for (const auto& p : grid_points(inst.domain, h)) {
    const double r = (retraining_map(inst, p, opts) - p).norm();
    if (r < out.residual) {
      out.residual = r;
      out.theta_star = p;
    }
  }
  out.objective = pr(inst, out.theta_star, opts).value;
  out.conclusive = out.residual <= tol;
  return out;
}

}  // namespace perflab
