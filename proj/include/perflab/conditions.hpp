#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perflab/constants.hpp"
#include "perflab/solvers.hpp"

namespace perflab {

enum class Condition { SMOOTH, SC, LIPZ, SENS, MIXDOM, WSC, RSI, PL, QG, WEAK_CVX_AT_PO };
enum class Verdict { certified, violated, inconclusive };
std::string_view to_string(Condition c);
std::string_view to_string(Verdict v);
/// Parses the lower-case names used on the command line ("sc", "mixdom", ...).
std::optional<Condition> parse_condition(std::string_view name);

struct Witness {
  std::vector<Theta> points;
  double residual = 0.0;
};

struct ConditionReport {
  Condition condition = Condition::SC;
  Verdict verdict = Verdict::inconclusive;
  /// Largest constant for which every probed residual is >= -tolerance.
  double best_constant = 0.0;
  /// The constant the verdict refers to: the declared one if present,
  /// otherwise the certification floor.
  double tested_constant = 0.0;
  ConstantSource constant_source = ConstantSource::estimated;
  double tolerance = 0.0;
  /// Smallest residual over all probes at tested_constant.
  double min_residual = 0.0;
  std::size_t n_probes = 0;
  std::string probe_spec;
  /// Variant of the condition when it has more than one form ("segment",
  /// "first_order", ...); empty otherwise.
  std::string variant;
  std::string note;
  /// At most five, sorted by residual (most negative first).
  std::vector<Witness> witnesses;
};

/// A scalar objective on a box together with the projection onto its
/// solution set (x_p in the conditions). Values and gradients must be
/// deterministic; Monte Carlo targets freeze their samples.
struct Target {
  std::string description;
  Box domain;
  std::function<double(const Theta&)> value;
  std::function<Vector(const Theta&)> gradient;
  std::function<Theta(const Theta&)> project_to_solutions;
  double f_star = 0.0;
  /// Additive residual tolerance: 1e-9 in closed form, 3 SE + 1e-9 otherwise.
  double tolerance = 1e-9;
  /// Spread of the minimisers found by independent restarts (0 if not applicable).
  double minimiser_spread = 0.0;
  bool minimiser_unique = true;
};

struct ProbeSpec {
  std::size_t grid_1d = 201;
  std::size_t random_points = 200;
  std::uint64_t seed = 0;
};

/// Probe points: an even grid over the box when d = 1, seeded uniform points otherwise.
std::vector<Theta> probe_points(const Box& box, const ProbeSpec& spec);

/// theta' -> DPR(anchor, theta'). The minimiser is found by 10 restarts of the
/// inner solver; a spread above 1e-4 marks the target non-unique.
Target dpr_target(const Instance& inst, const Theta& anchor, const EvalOptions& opts);

/// theta -> PR(theta) with solution point x_star. In Monte Carlo mode the seed
/// is held fixed and the gradient is the central difference of that sampled
/// function, so values and gradients describe the same objective.
Target pr_target(const Instance& inst, const Theta& x_star, const EvalOptions& opts);

/// The performative optimum, refined from the grid oracle by projected
/// gradient steps on the fixed-seed PR. Requires d <= 2.
Theta locate_optimum(const Instance& inst, const EvalOptions& opts);

/// Tests one of SC, WSC, RSI, PL, QG on the target.
///
/// Residuals, for a candidate constant mu and r = x - x_p:
///   SC   f(y) - f(x) - <g(x), y - x> - mu/2 ||y - x||^2   over probe pairs
///   WSC  f* - f(x) - <g(x), x_p - x> - mu/2 ||r||^2
///   RSI  <g(x), r> - mu ||r||^2
///   PL   ||g(x)||^2 / 2 - mu (f(x) - f*)
///   QG   f(x) - f* - mu ||r||^2
/// QG is normalised without the 1/2, so a quadratic of curvature c has QG
/// constant c/2 and the other four have constant c.
///
/// The best constant is found by bisection. Without a declared constant the
/// condition is certified when the best constant reaches a floor of 1% of the
/// largest secant curvature seen on the probes (halved for QG).
ConditionReport check_condition(const Target& target, Condition condition, const ProbeSpec& probes,
                                std::optional<double> declared = std::nullopt);

struct ChainAudit {
  std::vector<ConditionReport> reports;  // SC, WSC, RSI, PL, QG
  bool monotone = true;
  std::string diagnostic;
};

/// Runs the five checkers on the same probes and checks that no weaker
/// condition fails where a stronger one is certified.
ChainAudit chain_audit(const Target& target, const ProbeSpec& probes);

/// Empirical sensitivity: max over seeded theta pairs of W1 / ||theta - theta'||.
ConditionReport check_sensitivity(const Instance& inst, std::size_t n_pairs, const EvalOptions& opts);

/// Assumptions on the loss itself, probed on random points of the domain and
/// the 99.9% data region: SMOOTH (||grad_theta l(z) - grad_theta l(z')|| <=
/// beta ||z - z'||), SC (strong convexity in theta) and LIPZ. LIPZ is checked in
/// its value form |l(z) - l(z')| <= L ||z - z'||, the form the transport
/// arguments use. A declared constant is tested directly; otherwise the
/// estimate is reported and certified.
ConditionReport check_loss_assumption(const Instance& inst, Condition condition, std::size_t n_probes,
                                      const EvalOptions& opts);

/// Convexity of DPR in its first argument. Always returns the segment form;
/// adds the first-order form when the map has a score.
std::vector<ConditionReport> check_mixture_dominance(const Instance& inst, const Theta& anchor,
                                                     std::size_t n_segments, const EvalOptions& opts);

enum class TheoremStatus { certified, violated, premise_not_met, vacuous, inconclusive };
std::string_view to_string(TheoremStatus s);

struct NamedConstant {
  std::string name;
  SourcedConstant constant;
};

struct TheoremReport {
  int theorem = 1;
  TheoremStatus status = TheoremStatus::inconclusive;
  Theta theta_po;
  Theta theta_ps;
  double premise_gap = 0.0;
  double premise_tol = 0.0;
  std::vector<NamedConstant> constants;
  /// Theorem 1: mu / (2 beta). Theorem 2: mu' = mu - (beta + L) eps.
  double key_quantity = 0.0;
  /// Theorem 1: mu / (2 beta) >= eps. Theorem 2: mu' >= 0.
  bool condition_holds = false;
  std::vector<ConditionReport> probes;
  std::string note;
};

/// Checks mu/(2 beta) >= eps, with mu the WSC constant of DPR(theta_PO, .),
/// and probes PR(theta_PO) >= PR(theta) + <grad PR(theta), theta_PO - theta>.
TheoremReport validate_theorem1(const Instance& inst, const EvalOptions& opts, const ProbeSpec& probes = {},
                                double premise_tol = 1e-3);

/// Computes mu' = mu - (beta + L) eps, mu the RSI constant of DPR(theta_PO, .),
/// and probes RSI of PR on the far branch (||theta - theta_PO|| >= 1) and the
/// near-branch inequality with mu'(theta) = mu ||theta - theta_PO|| - (beta + L) eps
/// wherever that is nonnegative.
TheoremReport validate_theorem2(const Instance& inst, const EvalOptions& opts, const ProbeSpec& probes = {},
                                double premise_tol = 1e-3);

}  // namespace perflab
