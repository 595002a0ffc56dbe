#include "perflab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace perflab {

namespace {

constexpr double kBaseTol = 1e-9;
constexpr double kUniquenessTol = 1e-4;
constexpr int kRestarts = 10;
constexpr int kBisectionSteps = 30;
constexpr std::size_t kMaxWitnesses = 5;
constexpr std::uint64_t kRestartStream = 0x7e57a27;
constexpr std::uint64_t kPairStream = 0x9a125;
constexpr std::uint64_t kSegmentStream = 0x5e6;
constexpr std::uint64_t kLossProbeStream = 0x1055;

// One linear constraint base - mu * weight >= -tol on the constant mu.
struct Probe {
  std::vector<Theta> points;
  double base = 0.0;
  double weight = 0.0;
  double tol = 0.0;
  [[nodiscard]] double residual(double mu) const { return base - mu * weight; }
};

bool feasible(const std::vector<Probe>& probes, double mu) {
  return std::all_of(probes.begin(), probes.end(), [mu](const Probe& p) { return p.residual(mu) >= -p.tol; });
}

double largest_feasible(const std::vector<Probe>& probes, double scale) {
  if (!feasible(probes, 0.0)) return 0.0;
  double hi = std::max(scale, 1e-12);
  int doublings = 0;
  while (feasible(probes, hi)) {
    if (++doublings > 80) return hi;  // no probe constrains the constant
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(probes, mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<Witness> worst(const std::vector<Probe>& probes, double mu) {
  std::vector<std::size_t> order(probes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t k = std::min(kMaxWitnesses, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return probes[a].residual(mu) < probes[b].residual(mu); });
  std::vector<Witness> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({probes[order[i]].points, probes[order[i]].residual(mu)});
  return out;
}

double min_residual(const std::vector<Probe>& probes, double mu) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : probes) m = std::min(m, p.residual(mu));
  return probes.empty() ? 0.0 : m;
}

// Fills verdict-related fields of a report whose probes do not involve a constant.
void settle_fixed(ConditionReport& r, const std::vector<Probe>& probes) {
  r.n_probes = probes.size();
  r.min_residual = min_residual(probes, 0.0);
  r.witnesses = worst(probes, 0.0);
  for (const auto& p : probes) r.tolerance = std::max(r.tolerance, p.tol);
  if (probes.empty()) {
    r.verdict = Verdict::inconclusive;
    r.note += r.note.empty() ? "no probes" : "; no probes";
    return;
  }
  r.verdict = feasible(probes, 0.0) ? Verdict::certified : Verdict::violated;
  if (r.verdict == Verdict::violated) {
    // keep only genuine violations as witnesses
    std::erase_if(r.witnesses, [&](const Witness& w) { return w.residual >= -r.tolerance; });
  }
}

std::string describe_probes(const Box& box, const ProbeSpec& spec) {
  std::ostringstream os;
  if (box.dim() == 1) {
    os << "grid of " << spec.grid_1d << " points on [" << box.lower()[0] << ", " << box.upper()[0] << "]";
  } else {
    os << spec.random_points << " uniform points in the box, seed " << spec.seed;
  }
  return os.str();
}

double sample_tol(const Vector& per_sample) {
  const auto n = static_cast<double>(per_sample.size());
  if (per_sample.size() < 2) return kBaseTol;
  const double mean = per_sample.mean();
  const double var = (per_sample.array() - mean).square().sum() / (n - 1.0);
  return 3.0 * std::sqrt(var / n) + kBaseTol;
}

}  // namespace

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::SMOOTH: return "SMOOTH";
    case Condition::SC: return "SC";
    case Condition::LIPZ: return "LIPZ";
    case Condition::SENS: return "SENS";
    case Condition::MIXDOM: return "MIXDOM";
    case Condition::WSC: return "WSC";
    case Condition::RSI: return "RSI";
    case Condition::PL: return "PL";
    case Condition::QG: return "QG";
    case Condition::WEAK_CVX_AT_PO: return "WEAK_CVX_AT_PO";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string_view to_string(TheoremStatus s) {
  switch (s) {
    case TheoremStatus::certified: return "certified";
    case TheoremStatus::violated: return "violated";
    case TheoremStatus::premise_not_met: return "premise_not_met";
    case TheoremStatus::vacuous: return "vacuous";
    case TheoremStatus::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::optional<Condition> parse_condition(std::string_view name) {
  static const std::pair<std::string_view, Condition> table[] = {
      {"smooth", Condition::SMOOTH}, {"sc", Condition::SC},   {"lipz", Condition::LIPZ},
      {"sens", Condition::SENS},     {"mixdom", Condition::MIXDOM}, {"wsc", Condition::WSC},
      {"rsi", Condition::RSI},       {"pl", Condition::PL},   {"qg", Condition::QG},
      {"weak_cvx_at_po", Condition::WEAK_CVX_AT_PO},
  };
  for (const auto& [key, c] : table) {
    if (key == name) return c;
  }
  return std::nullopt;
}

std::vector<Theta> probe_points(const Box& box, const ProbeSpec& spec) {
  std::vector<Theta> out;
  if (box.dim() == 1) {
    for (double x : linspace(box.lower()[0], box.upper()[0], spec.grid_1d)) out.push_back(Theta::Constant(1, x));
    return out;
  }
  auto rng = SeedSpec{spec.seed, {}}.engine();
  for (std::size_t i = 0; i < spec.random_points; ++i) out.push_back(uniform_point(box, rng));
  return out;
}

Target dpr_target(const Instance& inst, const Theta& anchor, const EvalOptions& opts) {
  auto f = std::make_shared<const FrozenDpr>(inst, anchor, opts);
  std::vector<Theta> inits{inst.domain.center()};
  auto rng = opts.seed.child(kRestartStream).engine();
  for (int i = 1; i < kRestarts; ++i) inits.push_back(uniform_point(inst.domain, rng));

  auto value = [f](const Theta& x) { return f->value(x); };
  auto gradient = [f](const Theta& x) { return f->gradient(x); };
  Theta x_star;
  double spread = 0.0;
  for (const auto& init : inits) {
    const Theta x = minimise_projected(value, gradient, inst.domain, init, 1e-10, 10000).theta;
    if (x_star.size() == 0) {
      x_star = x;
    } else {
      spread = std::max(spread, (x - x_star).norm());
    }
  }

  Target t;
  std::ostringstream os;
  os << "DPR(anchor, .) with anchor " << anchor.transpose();
  t.description = os.str();
  t.domain = inst.domain;
  t.value = value;
  t.gradient = gradient;
  t.project_to_solutions = [x_star](const Theta&) { return x_star; };
  t.f_star = f->value(x_star);
  t.tolerance = kBaseTol + 3.0 * f->value_std_err(x_star);
  t.minimiser_spread = spread;
  t.minimiser_unique = spread <= kUniquenessTol;
  return t;
}

Target pr_target(const Instance& inst, const Theta& x_star, const EvalOptions& opts) {
  require_mode(inst, opts);
  Target t;
  t.description = "PR";
  t.domain = inst.domain;
  t.value = [inst, opts](const Theta& x) { return pr(inst, x, opts).value; };
  if (opts.mode == EvalMode::closed_form) {
    t.gradient = [inst, opts](const Theta& x) { return performative_gradient(inst, x, opts).total; };
  } else {
    t.gradient = [inst, opts](const Theta& x) { return finite_difference_pr(inst, x, 1e-4, opts); };
  }
  t.project_to_solutions = [x_star](const Theta&) { return x_star; };
  const auto at_star = pr(inst, x_star, opts);
  t.f_star = at_star.value;
  t.tolerance = kBaseTol + 3.0 * at_star.std_err;
  return t;
}

Theta locate_optimum(const Instance& inst, const EvalOptions& opts) {
  if (inst.dim() > 2) throw UnsupportedError("locate_optimum: the grid oracle is limited to d <= 2");
  const double h = inst.dim() == 1 ? (inst.domain.upper()[0] - inst.domain.lower()[0]) / 6000.0
                                   : inst.domain.diameter() / 100.0;
  const auto coarse = grid_oracle_po(inst, h, opts);
  const Target t = pr_target(inst, coarse.theta_star, opts);
  const auto refined = minimise_projected(t.value, t.gradient, inst.domain, coarse.theta_star, 1e-10, 20000).theta;
  // keep the grid point if local refinement did not improve it
  return t.value(refined) <= coarse.objective ? refined : coarse.theta_star;
}

ConditionReport check_condition(const Target& target, Condition condition, const ProbeSpec& spec,
                                std::optional<double> declared) {
  ConditionReport r;
  r.condition = condition;
  r.tolerance = target.tolerance;
  const auto pts = probe_points(target.domain, spec);
  std::vector<double> f(pts.size());
  std::vector<Vector> g(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    f[i] = target.value(pts[i]);
    g[i] = target.gradient(pts[i]);
  }

  // Largest secant curvature over probe pairs sets the certification scale.
  double kappa = 0.0;
  std::vector<Probe> probes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const Vector d = pts[j] - pts[i];
      const double d2 = d.squaredNorm();
      if (d2 == 0.0) continue;
      const double gap = f[j] - f[i] - g[i].dot(d);
      kappa = std::max(kappa, std::abs(2.0 * gap / d2));
      if (condition == Condition::SC) probes.push_back({{pts[i], pts[j]}, gap, 0.5 * d2, target.tolerance});
    }
  }

  if (condition != Condition::SC) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Theta xp = target.project_to_solutions(pts[i]);
      const Vector rv = pts[i] - xp;
      const double r2 = rv.squaredNorm();
      Probe p{{pts[i], xp}, 0.0, 0.0, target.tolerance};
      switch (condition) {
        case Condition::WSC:
          p.base = target.f_star - f[i] + g[i].dot(rv);
          p.weight = 0.5 * r2;
          break;
        case Condition::RSI:
          p.base = g[i].dot(rv);
          p.weight = r2;
          break;
        case Condition::PL:
          p.base = 0.5 * g[i].squaredNorm();
          p.weight = f[i] - target.f_star;
          break;
        case Condition::QG:
          p.base = f[i] - target.f_star;
          p.weight = r2;
          break;
        default:
          throw ContractError("check_condition: only SC, WSC, RSI, PL and QG are checked on targets");
      }
      probes.push_back(std::move(p));
    }
  }

  r.n_probes = probes.size();
  std::ostringstream os;
  os << describe_probes(target.domain, spec);
  if (condition == Condition::SC) os << "; " << probes.size() << " ordered pairs";
  os << "; target " << target.description;
  r.probe_spec = os.str();

  r.best_constant = largest_feasible(probes, std::max(kappa, 1.0));
  const double floor = std::max(1e-2 * kappa * (condition == Condition::QG ? 0.5 : 1.0), 1e-12);

  if (declared) {
    r.constant_source = ConstantSource::declared;
    r.tested_constant = *declared;
    r.verdict = feasible(probes, *declared) ? Verdict::certified : Verdict::violated;
  } else {
    r.constant_source = ConstantSource::estimated;
    const bool ok = r.best_constant >= floor;
    r.tested_constant = ok ? r.best_constant : floor;
    r.verdict = ok ? Verdict::certified : Verdict::violated;
    std::ostringstream note;
    note << "certification floor " << floor << " (1% of curvature scale " << kappa << ")";
    r.note = note.str();
  }
  r.min_residual = min_residual(probes, r.tested_constant);
  r.witnesses = worst(probes, r.tested_constant);
  if (r.verdict == Verdict::violated) {
    std::erase_if(r.witnesses, [&](const Witness& w) { return w.residual >= -r.tolerance; });
  }
  if (!target.minimiser_unique) {
    r.verdict = Verdict::inconclusive;
    std::ostringstream note;
    note << "minimiser not unique: restarts disagree by " << target.minimiser_spread;
    r.note = note.str();
  }
  return r;
}

ChainAudit chain_audit(const Target& target, const ProbeSpec& probes) {
  ChainAudit audit;
  for (auto c : {Condition::SC, Condition::WSC, Condition::RSI, Condition::PL, Condition::QG}) {
    audit.reports.push_back(check_condition(target, c, probes));
  }
  for (std::size_t i = 0; i < audit.reports.size(); ++i) {
    if (audit.reports[i].verdict != Verdict::certified) continue;
    for (std::size_t j = i + 1; j < audit.reports.size(); ++j) {
      if (audit.reports[j].verdict == Verdict::certified) continue;
      audit.monotone = false;
      if (!audit.diagnostic.empty()) audit.diagnostic += "; ";
      audit.diagnostic += std::string(to_string(audit.reports[i].condition)) + " certified but " +
                          std::string(to_string(audit.reports[j].condition)) + " " +
                          std::string(to_string(audit.reports[j].verdict)) + " (check tolerances)";
    }
  }
  return audit;
}

ConditionReport check_sensitivity(const Instance& inst, std::size_t n_pairs, const EvalOptions& opts) {
  ConditionReport r;
  r.condition = Condition::SENS;
  auto rng = opts.seed.child(kPairStream).engine();
  std::vector<Probe> probes;
  double best = 0.0;
  const double min_sep = 1e-6 * std::max(inst.domain.diameter(), 1e-12);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    Theta a = uniform_point(inst.domain, rng);
    Theta b = uniform_point(inst.domain, rng);
    while ((a - b).norm() < min_sep) b = uniform_point(inst.domain, rng);
    const double dist = (a - b).norm();
    const double w = induced_w1(inst, a, b, opts.with_seed(opts.seed.child(kPairStream).child(k)));
    best = std::max(best, w / dist);
    // residual eps * dist - W1, written as base - mu * weight with mu = eps
    probes.push_back({{a, b}, -w, -dist, 0.0});
  }
  r.best_constant = best;
  // coupled batches of a translation family are exact translates of each
  // other, so the only error left in the ratio is rounding
  r.tolerance = kBaseTol * (1.0 + best);
  for (auto& p : probes) p.tol = r.tolerance;
  std::ostringstream os;
  os << n_pairs << " uniform theta pairs, " << (opts.mode == EvalMode::closed_form ? "closed form" : "coupled batches")
     << ", n = " << opts.n;
  r.probe_spec = os.str();
  r.n_probes = probes.size();
  if (inst.declared.eps) {
    r.constant_source = ConstantSource::declared;
    r.tested_constant = *inst.declared.eps;
  } else {
    r.constant_source = ConstantSource::estimated;
    r.tested_constant = best;
  }
  const double mu = r.tested_constant;
  r.verdict = feasible(probes, mu) ? Verdict::certified : Verdict::violated;
  r.min_residual = min_residual(probes, mu);
  r.witnesses = worst(probes, mu);
  if (r.verdict == Verdict::violated) {
    std::erase_if(r.witnesses, [&](const Witness& w) { return w.residual >= -r.tolerance; });
  }
  return r;
}

ConditionReport check_loss_assumption(const Instance& inst, Condition condition, std::size_t n_probes,
                                      const EvalOptions& opts) {
  if (condition != Condition::SMOOTH && condition != Condition::SC && condition != Condition::LIPZ) {
    throw ContractError("check_loss_assumption: condition must be SMOOTH, SC or LIPZ");
  }
  const Box region = data_region(inst, opts);
  auto rng = opts.seed.child(kLossProbeStream).engine();
  const auto& loss = inst.loss;
  std::vector<Probe> probes;
  probes.reserve(n_probes);
  // SMOOTH and LIPZ bound a ratio from above (probe: mu * dist - diff);
  // SC bounds a curvature from below (probe: gap - mu/2 ||dtheta||^2)
  for (std::size_t k = 0; k < n_probes; ++k) {
    const Theta t = uniform_point(inst.domain, rng);
    const Vector z = uniform_point(region, rng);
    if (condition == Condition::SC) {
      const Theta tp = uniform_point(inst.domain, rng);
      const double gap = loss_value(loss, z, tp) - loss_value(loss, z, t) - grad_theta(loss, z, t).dot(tp - t);
      probes.push_back({{t, tp, z}, gap, 0.5 * (tp - t).squaredNorm(), kBaseTol * (1.0 + std::abs(gap))});
      continue;
    }
    const Vector zp = uniform_point(region, rng);
    const double dist = (z - zp).norm();
    const double diff = condition == Condition::SMOOTH
                            ? (grad_theta(loss, z, t) - grad_theta(loss, zp, t)).norm()
                            : std::abs(loss_value(loss, z, t) - loss_value(loss, zp, t));
    probes.push_back({{t, z, zp}, -diff, -dist, kBaseTol * (1.0 + diff)});
  }

  ConditionReport r;
  r.condition = condition;
  r.n_probes = probes.size();
  std::ostringstream os;
  os << n_probes << " uniform probes over the domain x 99.9% data region, seed stream " << kLossProbeStream;
  r.probe_spec = os.str();
  std::optional<double> declared;
  if (condition == Condition::SC) {
    declared = inst.declared.gamma_sc;
    r.best_constant = largest_feasible(probes, 1.0);
  } else {
    declared = condition == Condition::SMOOTH ? inst.declared.beta : inst.declared.lip_L;
    double best = 0.0;
    for (const auto& p : probes)
      if (p.weight < 0.0) best = std::max(best, p.base / p.weight);
    r.best_constant = best;
    if (condition == Condition::LIPZ) r.variant = "value";
  }
  for (const auto& p : probes) r.tolerance = std::max(r.tolerance, p.tol);
  r.constant_source = declared ? ConstantSource::declared : ConstantSource::estimated;
  r.tested_constant = declared.value_or(r.best_constant);
  r.verdict = feasible(probes, r.tested_constant) ? Verdict::certified : Verdict::violated;
  if (condition == Condition::SC && !declared && r.best_constant <= 0.0) {
    r.verdict = Verdict::violated;
    r.note = "no positive strong-convexity modulus on the probes";
  }
  r.min_residual = min_residual(probes, r.tested_constant);
  r.witnesses = worst(probes, r.tested_constant);
  if (r.verdict == Verdict::violated && r.best_constant > 0.0) {
    std::erase_if(r.witnesses, [&](const Witness& w) { return w.residual >= -r.tolerance; });
  }
  return r;
}

std::vector<ConditionReport> check_mixture_dominance(const Instance& inst, const Theta& anchor,
                                                     std::size_t n_segments, const EvalOptions& opts) {
  require_mode(inst, opts);
  const bool exact = opts.mode == EvalMode::closed_form;
  std::vector<ConditionReport> out;

  {
    ConditionReport r;
    r.condition = Condition::MIXDOM;
    r.variant = "segment";
    auto rng = opts.seed.child(kSegmentStream).engine();
    std::vector<Probe> probes;
    for (std::size_t k = 0; k < n_segments; ++k) {
      const Theta a = uniform_point(inst.domain, rng);
      const Theta b = uniform_point(inst.domain, rng);
      const auto seg_opts = opts.with_seed(opts.seed.child(kSegmentStream).child(k));
      for (double lam : {0.25, 0.5, 0.75}) {
        const Theta m = lam * a + (1.0 - lam) * b;
        if (exact) {
          const double res = lam * dpr(inst, a, anchor, opts).value + (1.0 - lam) * dpr(inst, b, anchor, opts).value -
                             dpr(inst, m, anchor, opts).value;
          probes.push_back({{a, b, m}, res, 0.0, kBaseTol});
        } else {
          const Vector la = loss_values(inst.loss, sample(inst.map, a, opts.n, seg_opts.seed).points, anchor);
          const Vector lb = loss_values(inst.loss, sample(inst.map, b, opts.n, seg_opts.seed).points, anchor);
          const Vector lm = loss_values(inst.loss, sample(inst.map, m, opts.n, seg_opts.seed).points, anchor);
          const Vector per = lam * la + (1.0 - lam) * lb - lm;
          probes.push_back({{a, b, m}, per.mean(), 0.0, sample_tol(per)});
        }
      }
    }
    std::ostringstream os;
    os << n_segments << " uniform segments x lambda in {0.25, 0.5, 0.75}, anchor " << anchor.transpose();
    r.probe_spec = os.str();
    settle_fixed(r, probes);
    out.push_back(std::move(r));
  }

  if (inst.map.has_density()) {
    ConditionReport r;
    r.condition = Condition::MIXDOM;
    r.variant = "first_order";
    std::vector<Probe> probes;
    const ProbeSpec spec{201, 200, opts.seed.stream_key()};
    if (exact) {
      const double base = pr(inst, anchor, opts).value;
      const Vector g2 = performative_gradient(inst, anchor, opts).grad2;
      for (const auto& tp : probe_points(inst.domain, spec)) {
        const double res = dpr(inst, tp, anchor, opts).value - base - g2.dot(tp - anchor);
        probes.push_back({{anchor, tp}, res, 0.0, kBaseTol});
      }
    } else {
      const auto at = sample(inst.map, anchor, opts.n, opts.seed);
      const Vector l0 = loss_values(inst.loss, at.points, anchor);
      Matrix scores(at.points.rows(), anchor.size());
      for (Eigen::Index i = 0; i < at.points.rows(); ++i) {
        scores.row(i) = score(inst.map, at.points.row(i).transpose(), anchor).transpose();
      }
      for (const auto& tp : probe_points(inst.domain, spec)) {
        const Vector l1 = loss_values(inst.loss, sample(inst.map, tp, opts.n, opts.seed).points, anchor);
        const Vector per = l1 - l0 - (l0.array() * (scores * (tp - anchor)).array()).matrix();
        probes.push_back({{anchor, tp}, per.mean(), 0.0, sample_tol(per)});
      }
    }
    r.probe_spec = describe_probes(inst.domain, spec) + "; DPR(theta', anchor) - PR(anchor) - <E l score, theta' - anchor>";
    settle_fixed(r, probes);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

struct Premise {
  Theta po;
  Theta ps;
  double gap = 0.0;
  bool met = false;
  bool conclusive = true;
};

Premise check_premise(const Instance& inst, const EvalOptions& opts, double tol) {
  Premise p;
  p.po = locate_optimum(inst, opts);
  const auto ps = fixed_point_oracle_ps(inst, opts);
  p.ps = ps.theta_star;
  p.conclusive = ps.conclusive;
  p.gap = (p.po - p.ps).norm();
  p.met = p.gap <= tol;
  return p;
}

void record_premise(TheoremReport& rep, const Premise& p, double tol) {
  rep.theta_po = p.po;
  rep.theta_ps = p.ps;
  rep.premise_gap = p.gap;
  rep.premise_tol = tol;
  if (!p.conclusive) {
    rep.status = TheoremStatus::inconclusive;
    rep.note = "stable point search did not converge";
  } else if (!p.met) {
    rep.status = TheoremStatus::premise_not_met;
    std::ostringstream os;
    os << "theta_PO and theta_PS differ by " << p.gap << " > " << tol << "; no verdict";
    rep.note = os.str();
  }
}

// mu from a declared value or the requested checker on DPR(theta_PO, .).
std::optional<SourcedConstant> dpr_constant(const Instance& inst, const Theta& po, const EvalOptions& opts,
                                            const ProbeSpec& probes, Condition c, std::optional<double> declared,
                                            std::string& note) {
  if (declared) return SourcedConstant{*declared, ConstantSource::declared};
  const auto rep = check_condition(dpr_target(inst, po, opts), c, probes);
  if (rep.verdict != Verdict::certified) {
    note = std::string(to_string(c)) + " of DPR(theta_PO, .) not certified: " + rep.note;
    return std::nullopt;
  }
  return SourcedConstant{rep.best_constant, ConstantSource::estimated};
}

}  // namespace

TheoremReport validate_theorem1(const Instance& inst, const EvalOptions& opts, const ProbeSpec& probes,
                                double premise_tol) {
  TheoremReport rep;
  rep.theorem = 1;
  const auto premise = check_premise(inst, opts, premise_tol);
  record_premise(rep, premise, premise_tol);
  if (!premise.met || !premise.conclusive) return rep;

  std::string why;
  const auto mu = dpr_constant(inst, premise.po, opts, probes, Condition::WSC, inst.declared.mu_wsc, why);
  if (!mu) {
    rep.status = TheoremStatus::inconclusive;
    rep.note = why;
    return rep;
  }
  const auto beta = resolve_beta(inst, opts);
  const auto eps = resolve_eps(inst);
  rep.constants = {{"mu", *mu}, {"beta", beta}, {"eps", eps}};
  rep.key_quantity = beta.value > 0.0 ? mu->value / (2.0 * beta.value) : std::numeric_limits<double>::infinity();
  rep.condition_holds = rep.key_quantity >= eps.value;

  // star-shaped first-order inequality toward theta_PO
  const Target t = pr_target(inst, premise.po, opts);
  std::vector<Probe> ps;
  for (const auto& x : probe_points(inst.domain, probes)) {
    const double res = t.f_star - t.value(x) - t.gradient(x).dot(premise.po - x);
    ps.push_back({{x, premise.po}, res, 0.0, t.tolerance});
  }
  ConditionReport goal;
  goal.condition = Condition::WEAK_CVX_AT_PO;
  goal.probe_spec = describe_probes(inst.domain, probes) + "; PR(theta_PO) - PR(theta) - <grad PR(theta), theta_PO - theta>";
  goal.constant_source = mu->source;
  settle_fixed(goal, ps);
  goal.note = "tests the first-order inequality toward theta_PO (star convexity), not global weak convexity";
  rep.probes.push_back(goal);

  if (!rep.condition_holds) {
    rep.status = TheoremStatus::vacuous;
    rep.note = "mu / (2 beta) < eps: the theorem makes no claim; probe results are informational";
  } else {
    rep.status = goal.verdict == Verdict::certified ? TheoremStatus::certified
                 : goal.verdict == Verdict::violated ? TheoremStatus::violated
                                                     : TheoremStatus::inconclusive;
  }
  return rep;
}

TheoremReport validate_theorem2(const Instance& inst, const EvalOptions& opts, const ProbeSpec& probes,
                                double premise_tol) {
  TheoremReport rep;
  rep.theorem = 2;
  const auto premise = check_premise(inst, opts, premise_tol);
  record_premise(rep, premise, premise_tol);
  if (!premise.met || !premise.conclusive) return rep;

  std::string why;
  const auto mu = dpr_constant(inst, premise.po, opts, probes, Condition::RSI, inst.declared.mu_rsi, why);
  if (!mu) {
    rep.status = TheoremStatus::inconclusive;
    rep.note = why;
    return rep;
  }
  const auto beta = resolve_beta(inst, opts);
  const auto lip = resolve_lip_L(inst, opts);
  const auto eps = resolve_eps(inst);
  const double shrink = (beta.value + lip.value) * eps.value;
  const double mu_prime = mu->value - shrink;
  rep.constants = {{"mu", *mu}, {"beta", beta}, {"L", lip}, {"eps", eps}};
  rep.key_quantity = mu_prime;
  rep.condition_holds = mu_prime >= 0.0;
  if (!rep.condition_holds) {
    rep.status = TheoremStatus::vacuous;
    rep.note = "theorem vacuous at these constants: mu' = mu - (beta + L) eps < 0";
    return rep;
  }

  const Target t = pr_target(inst, premise.po, opts);
  std::vector<Probe> far;
  std::vector<Probe> near;
  for (const auto& x : probe_points(inst.domain, probes)) {
    const Vector r = x - premise.po;
    const double dist = r.norm();
    const double inner = t.gradient(x).dot(r);
    if (dist >= 1.0) {
      far.push_back({{x, premise.po}, inner - mu_prime * dist * dist, 0.0, t.tolerance});
    } else {
      const double local = mu->value * dist - shrink;
      if (local >= 0.0 && dist > 0.0) near.push_back({{x, premise.po}, inner - local * dist * dist, 0.0, t.tolerance});
    }
  }
  ConditionReport far_rep;
  far_rep.condition = Condition::RSI;
  far_rep.variant = "far";
  far_rep.best_constant = mu_prime;
  far_rep.tested_constant = mu_prime;
  far_rep.constant_source = mu->source;
  far_rep.probe_spec = describe_probes(inst.domain, probes) + "; probes with ||theta - theta_PO|| >= 1";
  settle_fixed(far_rep, far);
  ConditionReport near_rep;
  near_rep.condition = Condition::RSI;
  near_rep.variant = "near";
  near_rep.constant_source = mu->source;
  near_rep.probe_spec = describe_probes(inst.domain, probes) +
                        "; probes with ||theta - theta_PO|| < 1 and mu ||theta - theta_PO|| >= (beta + L) eps";
  settle_fixed(near_rep, near);
  if (near.empty()) near_rep.note = "no probe where the near-branch constant is nonnegative";

  const bool any_violation = far_rep.verdict == Verdict::violated || near_rep.verdict == Verdict::violated;
  if (any_violation) {
    rep.status = TheoremStatus::violated;
  } else if (far_rep.verdict == Verdict::certified) {
    rep.status = TheoremStatus::certified;
  } else {
    rep.status = TheoremStatus::inconclusive;
    rep.note = "no probe on the far branch";
  }
  rep.probes = {far_rep, near_rep};
  return rep;
}

}  // namespace perflab
