#include "perflab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace perflab {

namespace {

constexpr double kBaseTol = 1e-9;
constexpr std::size_t kMaxWitnesses = 5;

double sample_tol(double std_err) { return kBaseTol + 3.0 * std_err; }

void require_stable(const Instance& inst, const Theta& theta, const EvalOptions& opts, double tol) {
  const double residual = (retraining_map(inst, theta, opts) - theta).norm();
  if (!(residual <= tol)) {
    std::ostringstream os;
    os << "theta_stable is not a fixed point of the retraining map: residual " << residual << " > " << tol;
    throw ContractError(os.str());
  }
}

GroundTruth truth_or_compute(const Instance& inst, const EvalOptions& opts, const BoundsOptions& bopts,
                             const std::optional<GroundTruth>& truth) {
  return truth ? *truth : ground_truth(inst, opts, bopts);
}

void finish(Certificate& c) {
  c.holds = c.actual_value <= c.bound_value + c.tolerance;
  c.status = c.holds ? CertificateStatus::holds : CertificateStatus::fails;
}

std::optional<SourcedConstant> gamma_qg(const Instance& inst, const Theta& theta, const EvalOptions& opts,
                                        const ProbeSpec& probes, std::string& why) {
  if (inst.declared.gamma_qg) return SourcedConstant{*inst.declared.gamma_qg, ConstantSource::declared};
  const auto rep = check_condition(dpr_target(inst, theta, opts), Condition::QG, probes);
  if (rep.verdict != Verdict::certified) {
    why = "quadratic growth of Delta at theta_stable not certified (" + std::string(to_string(rep.verdict)) + ")";
    return std::nullopt;
  }
  return SourcedConstant{rep.best_constant, ConstantSource::estimated};
}

Certificate distance_certificate(CertificateName name, const Instance& inst, const Theta& theta_stable,
                                 const EvalOptions& opts, const BoundsOptions& bopts,
                                 const std::optional<GroundTruth>& truth) {
  require_stable(inst, theta_stable, opts, bopts.stable_tol);
  const auto gt = truth_or_compute(inst, opts, bopts, truth);
  Certificate c;
  c.name = name;
  c.actual_value = (gt.theta_po - theta_stable).norm();
  c.tolerance = gt.grid_step + bopts.stable_tol;

  const auto L = resolve_lip_L(inst, opts);
  c.constants.push_back({"L", L});
  std::string why;
  const auto gamma = gamma_qg(inst, theta_stable, opts, bopts.probes, why);
  if (gamma) c.constants.push_back({"gamma_qg", *gamma});
  if (!gamma || gamma->value <= 0.0) {
    c.status = CertificateStatus::inconclusive;
    c.note = gamma ? "gamma_qg is zero" : why;
    return c;
  }
  if (name == CertificateName::EX2_DIST_SQRT) {
    const auto B = resolve_shift_bound(inst, opts);
    c.constants.push_back({"B", B});
    c.bound_value = std::sqrt(L.value * B.value / gamma->value);
  } else {
    const auto eps = resolve_eps(inst);
    c.constants.push_back({"eps", eps});
    c.bound_value = L.value * eps.value / gamma->value;
  }
  finish(c);
  return c;
}

}  // namespace

std::string_view to_string(CertificateName name) {
  switch (name) {
    case CertificateName::PROP1_OPTIMALITY: return "PROP1_OPTIMALITY";
    case CertificateName::EX1_SUBOPT_LB: return "EX1_SUBOPT_LB";
    case CertificateName::EX2_DIST_SQRT: return "EX2_DIST_SQRT";
    case CertificateName::EX3_DIST_LIN: return "EX3_DIST_LIN";
  }
  return "?";
}

std::string_view to_string(CertificateStatus status) {
  switch (status) {
    case CertificateStatus::holds: return "holds";
    case CertificateStatus::fails: return "fails";
    case CertificateStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

GroundTruth ground_truth(const Instance& inst, const EvalOptions& opts, const BoundsOptions& bopts) {
  if (inst.dim() > 2) throw UnsupportedError("ground_truth: the grid oracle is limited to d <= 2");
  const double h = bopts.grid_step.value_or(inst.dim() == 1
                                                ? (inst.domain.upper()[0] - inst.domain.lower()[0]) / 6000.0
                                                : inst.domain.diameter() / 100.0);
  const auto oracle = grid_oracle_po(inst, h, opts);
  GroundTruth gt;
  gt.theta_po = oracle.theta_star;
  gt.grid_step = h;
  const auto at = pr(inst, oracle.theta_star, opts);
  gt.pr_min = at.value;
  gt.pr_min_std_err = at.std_err;
  return gt;
}

double gap_inequality_residual(const Instance& inst, const Theta& theta, const Theta& theta_prime, double lip_L,
                               const EvalOptions& opts) {
  // PR(theta') - PR(theta) - Delta_theta(theta') collapses to PR(theta') - DPR(theta, theta')
  const double diff = pr(inst, theta_prime, opts).value - dpr(inst, theta, theta_prime, opts).value;
  return diff + lip_L * induced_w1(inst, theta, theta_prime, opts);
}

double gap_inequality_residual(const Instance& inst, const Theta& theta, const Theta& theta_prime,
                               const EvalOptions& opts) {
  if (!inst.declared.lip_L) {
    throw MissingConstantError("gap inequality needs L: declare constants.lip_L or estimate it with resolve_lip_L");
  }
  return gap_inequality_residual(inst, theta, theta_prime, *inst.declared.lip_L, opts);
}

Certificate prop1_certificate(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                              const BoundsOptions& bopts, const std::optional<GroundTruth>& truth) {
  require_stable(inst, theta_stable, opts, bopts.stable_tol);
  const auto gt = truth_or_compute(inst, opts, bopts, truth);
  const auto L = resolve_lip_L(inst, opts);

  Certificate c;
  c.name = CertificateName::PROP1_OPTIMALITY;
  c.constants.push_back({"L", L});
  auto probes = probe_points(inst.domain, bopts.probes);
  probes.push_back(gt.theta_po);

  std::vector<Witness> failing;
  for (const auto& tp : probes) {
    const auto gap = subopt_gap(inst, theta_stable, tp, opts);
    const double residual = gap.value - L.value * induced_w1(inst, theta_stable, tp, opts);
    if (residual < -sample_tol(gap.std_err)) failing.push_back({{tp}, residual});
  }
  c.n_probes = probes.size();
  c.n_failing = failing.size();
  std::sort(failing.begin(), failing.end(), [](const Witness& a, const Witness& b) { return a.residual < b.residual; });
  if (failing.size() > kMaxWitnesses) failing.resize(kMaxWitnesses);
  c.failing_probes = std::move(failing);

  const auto at = pr(inst, theta_stable, opts);
  c.actual_value = at.value;
  c.bound_value = gt.pr_min;
  c.tolerance = sample_tol(at.std_err + gt.pr_min_std_err);
  const bool oracle_agrees = c.actual_value <= c.bound_value + c.tolerance;

  if (c.n_failing > 0) {
    c.status = CertificateStatus::fails;
    std::ostringstream os;
    os << "premise Delta >= L W fails at " << c.n_failing << " of " << c.n_probes << " probes; no optimality claim";
    c.note = os.str();
  } else if (!oracle_agrees) {
    c.status = CertificateStatus::fails;
    c.note = "premise met at every probe but the grid oracle undercuts PR(theta_stable); constants are suspect";
  } else {
    c.status = CertificateStatus::holds;
    c.holds = true;
    c.note = "premise met at every probe; optimality certified and consistent with the grid oracle";
  }
  return c;
}

Certificate example1_bound(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                           const BoundsOptions& bopts, const std::optional<GroundTruth>& truth) {
  require_stable(inst, theta_stable, opts, bopts.stable_tol);
  const auto gt = truth_or_compute(inst, opts, bopts, truth);
  const auto L = resolve_lip_L(inst, opts);
  const auto B = resolve_shift_bound(inst, opts);
  const auto at = pr(inst, theta_stable, opts);

  Certificate c;
  c.name = CertificateName::EX1_SUBOPT_LB;
  c.constants = {{"L", L}, {"B", B}};
  c.bound_value = L.value * B.value;
  c.actual_value = at.value - gt.pr_min;
  c.tolerance = sample_tol(at.std_err + gt.pr_min_std_err);
  finish(c);
  return c;
}

Certificate example2_bound(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                           const BoundsOptions& bopts, const std::optional<GroundTruth>& truth) {
  return distance_certificate(CertificateName::EX2_DIST_SQRT, inst, theta_stable, opts, bopts, truth);
}

Certificate example3_bound(const Instance& inst, const Theta& theta_stable, const EvalOptions& opts,
                           const BoundsOptions& bopts, const std::optional<GroundTruth>& truth) {
  return distance_certificate(CertificateName::EX3_DIST_LIN, inst, theta_stable, opts, bopts, truth);
}

CertificationRun certify_all(const Instance& inst, const EvalOptions& opts, const BoundsOptions& bopts) {
  CertificationRun run;
  run.stable = fixed_point_oracle_ps(inst, opts);
  if (!run.stable.conclusive) {
    std::ostringstream os;
    os << "stable point search inconclusive: best fixed-point residual " << run.stable.residual;
    throw ContractError(os.str());
  }
  run.truth = ground_truth(inst, opts, bopts);
  const Theta& ps = run.stable.theta_star;
  run.certificates = {prop1_certificate(inst, ps, opts, bopts, run.truth),
                      example1_bound(inst, ps, opts, bopts, run.truth),
                      example2_bound(inst, ps, opts, bopts, run.truth),
                      example3_bound(inst, ps, opts, bopts, run.truth)};
  return run;
}

ShiftGradientRatio shift_gradient_ratio(const Instance& inst, const Theta& theta, const EvalOptions& opts,
                                        const ProbeSpec& probes) {
  ShiftGradientRatio out;
  out.argmax = theta;
  std::vector<double> ratios;
  for (const auto& tp : probe_points(inst.domain, probes)) {
    const double g = dpr_gradient(inst, theta, tp, opts).grad.squaredNorm();
    if (g < 1e-12) {
      ++out.n_skipped;
      continue;
    }
    const double r = induced_w1(inst, theta, tp, opts) / g;
    if (ratios.empty() || r > out.max_ratio) {
      out.max_ratio = r;
      out.argmax = tp;
    }
    ratios.push_back(r);
  }
  out.n_probes = ratios.size();
  if (!ratios.empty()) {
    const auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
    std::nth_element(ratios.begin(), mid, ratios.end());
    out.median_ratio = *mid;
  }
  return out;
}

}  // namespace perflab
