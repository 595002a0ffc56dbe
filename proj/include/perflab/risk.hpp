#pragma once

#include "perflab/instance.hpp"

namespace perflab {

/// A Monte Carlo or exact value of an expected loss.
struct RiskEstimate {
  double value = 0.0;
  double std_err = 0.0;  // sample std / sqrt(n); zero in closed form
  std::size_t n = 0;
  EvalMode mode = EvalMode::monte_carlo;
};

/// Split of the performative gradient: grad1 = E grad_theta l, grad2 = E l * score.
struct GradEstimate {
  Vector grad1;
  Vector grad2;
  Vector total;
  Vector std_err;  // per coordinate, of total
  std::size_t n = 0;
  EvalMode mode = EvalMode::monte_carlo;
  /// grad2 came from central differences of DPR in its distribution argument
  /// because the map has no score.
  bool grad2_fallback = false;
};

/// True when the instance admits exact PR/DPR formulas (Gaussian location map
/// with the squared loss).
bool supports_closed_form(const Instance& inst);

/// Throws UnsupportedError if `opts` asks for closed form and the instance has none.
void require_mode(const Instance& inst, const EvalOptions& opts);

/// DPR(theta1, theta2) = E_{z ~ D(theta1)} l(z; theta2).
RiskEstimate dpr(const Instance& inst, const Theta& theta1, const Theta& theta2, const EvalOptions& opts);

/// PR(theta) = DPR(theta, theta).
RiskEstimate pr(const Instance& inst, const Theta& theta, const EvalOptions& opts);

/// Delta_theta(theta') = DPR(theta, theta') - DPR(theta, theta), on one shared batch.
RiskEstimate subopt_gap(const Instance& inst, const Theta& theta, const Theta& theta_prime, const EvalOptions& opts);

/// grad_{theta2} DPR(theta1, theta2) with per-coordinate standard errors.
struct DprGradient {
  Vector grad;
  Vector std_err;
};
DprGradient dpr_gradient(const Instance& inst, const Theta& theta1, const Theta& theta2, const EvalOptions& opts);

/// Gradient of PR via the split grad1 + grad2.
GradEstimate performative_gradient(const Instance& inst, const Theta& theta, const EvalOptions& opts);

/// Central finite difference of PR, step h, shared seed for both sides.
Vector finite_difference_pr(const Instance& inst, const Theta& theta, double h, const EvalOptions& opts);

/// Sample-average approximation of theta' -> DPR(theta_env, theta') on one
/// frozen batch. Exact (population) in closed-form mode.
class FrozenDpr {
 public:
  FrozenDpr(const Instance& inst, Theta theta_env, const EvalOptions& opts);

  [[nodiscard]] double value(const Theta& theta) const;
  [[nodiscard]] Vector gradient(const Theta& theta) const;
  /// Standard error of the batch mean at theta (0 in closed form).
  [[nodiscard]] double value_std_err(const Theta& theta) const;
  [[nodiscard]] const Theta& environment() const { return env_; }
  [[nodiscard]] EvalMode mode() const { return mode_; }

 private:
  Instance inst_;
  Theta env_;
  EvalMode mode_;
  Matrix points_;
};

}  // namespace perflab
