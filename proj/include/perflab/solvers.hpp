#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "perflab/risk.hpp"

namespace perflab {

enum class SolverMethod { RRM, RGD, PGD };
enum class StopReason { converged, max_iters, diverged };
std::string_view to_string(SolverMethod method);
std::string_view to_string(StopReason reason);

struct Trajectory {
  SolverMethod method = SolverMethod::RRM;
  double step_size = 0.0;  // unused by RRM
  StopReason stop_reason = StopReason::max_iters;
  std::vector<Theta> iterates;
  std::vector<RiskEstimate> pr_values;
  /// Norm of the update direction at each iterate: the projected gradient
  /// mapping for RGD/PGD, the retraining-objective gradient for RRM.
  std::vector<double> grad_norms;

  [[nodiscard]] const Theta& final_theta() const { return iterates.back(); }
};

enum class OracleMethod { grid, fixed_point, analytic };
std::string_view to_string(OracleMethod method);

struct OracleResult {
  Theta theta_star;
  double objective = 0.0;
  double grid_step = 0.0;
  OracleMethod method = OracleMethod::grid;
  /// Fixed-point residual ||T(theta) - theta|| (fixed-point oracle only).
  double residual = 0.0;
  /// Observed ratio of successive retraining gaps (fixed-point oracle only).
  double contraction_ratio = 0.0;
  bool conclusive = true;
};

struct InnerResult {
  Theta theta;
  double grad_mapping_norm = 0.0;
  std::size_t iterations = 0;
};

/// Projected gradient descent on a box with a gradient-Lipschitz backtracking
/// test. Stops when the unit-step gradient mapping is <= tol. Throws
/// DivergenceError if the value becomes non-finite or exceeds ten times its
/// (positive) starting value.
InnerResult minimise_projected(const std::function<double(const Theta&)>& value,
                               const std::function<Vector(const Theta&)>& gradient, const Box& box,
                               const Theta& init, double tol, std::size_t max_iters);

/// Minimises theta' -> DPR(theta_env, theta') over the box by projected
/// gradient descent with backtracking, on one frozen batch drawn from
/// D(theta_env). Throws DivergenceError if the objective blows up.
InnerResult inner_argmin(const Instance& inst, const Theta& theta_env, const Theta& init, const EvalOptions& opts,
                         double tol = 1e-10, std::size_t max_iters = 10000);

/// One application of the retraining map T(theta) = argmin DPR(theta, .).
Theta retraining_map(const Instance& inst, const Theta& theta, const EvalOptions& opts);

/// 0.1 / (beta + lambda + 1), beta declared or taken from the loss.
double default_step(const Instance& inst);

/// Default stopping tolerance for closed-form runs.
inline constexpr double kClosedFormTol = 1e-5;

/// Repeated risk minimisation. Fresh samples every outer iteration (stream
/// path extended by the iteration index). Stops when successive iterates are
/// within tol; in Monte Carlo mode the default tol is three standard errors of
/// the inner solution.
Trajectory rrm(const Instance& inst, const Theta& theta0, std::size_t max_iters, const EvalOptions& opts,
               std::optional<double> tol = std::nullopt);

/// Repeated gradient descent: step on E_{D(theta_t)} grad_theta l(z; theta_t).
Trajectory rgd(const Instance& inst, const Theta& theta0, double step, std::size_t max_iters, const EvalOptions& opts,
               std::optional<double> tol = std::nullopt);

/// Performative gradient descent: step on the full gradient grad1 + grad2.
Trajectory pgd(const Instance& inst, const Theta& theta0, double step, std::size_t max_iters, const EvalOptions& opts,
               std::optional<double> tol = std::nullopt);

/// Brute-force minimiser of PR over a grid of spacing h covering the box
/// (d <= 2). Every cell uses the same seed. Ties go to the smaller norm, then
/// lexicographic order.
OracleResult grid_oracle_po(const Instance& inst, double h, const EvalOptions& opts);

/// Performatively stable point: iterates the retraining map under one fixed
/// seed while it contracts; otherwise scans a grid for the smallest fixed-point
/// residual and flags the result inconclusive if that residual exceeds tol.
OracleResult fixed_point_oracle_ps(const Instance& inst, const EvalOptions& opts, double tol = kClosedFormTol);

/// Grid nodes lower + k h along each axis (k = 0, 1, ...), row-major over axes.
std::vector<Theta> grid_points(const Box& box, double h);

}  // namespace perflab
