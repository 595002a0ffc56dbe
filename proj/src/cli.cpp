#include "perflab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "perflab/serialize.hpp"

namespace perflab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::string instance;
  std::uint64_t seed = 0;
  std::size_t samples = 10000;
  std::optional<double> grid_step;
  std::string out = ".";
  bool closed_form = false;
};

struct SolveArgs {
  std::string method;
  std::vector<double> theta0;
  std::optional<std::size_t> max_iters;
  std::optional<double> step;
  std::optional<double> tol;
};

struct VerifyArgs {
  std::vector<std::string> conditions;
  bool chain = false;
  int theorem = 0;
  std::string anchor = "po";
  std::string target = "dpr";
  std::size_t pairs = 50;
  std::size_t segments = 20;
  std::size_t loss_probes = 2000;
};

struct ReplayArgs {
  std::string manifest;
  std::optional<std::string> out;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit code of a command plus the files it wrote, relative to --out.
struct Outcome {
  int code = kExitOk;
  std::vector<std::string> outputs;
};

// ---- small helpers -------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + path.string());
  os << content;
  os.close();
  if (!os) throw IoError("write failed: " + path.string());
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  return fs::path(dir);
}

// FNV-1a, enough to notice that an instance file changed between runs.
std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

EvalOptions eval_options(const CommonArgs& c) {
  EvalOptions o;
  o.mode = c.closed_form ? EvalMode::closed_form : EvalMode::monte_carlo;
  o.n = c.samples;
  o.seed = SeedSpec{c.seed, {}};
  return o;
}

std::string show(const Vector& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
  return s + ")";
}

double default_oracle_step(const Instance& inst) {
  return inst.dim() == 1 ? (inst.domain.upper()[0] - inst.domain.lower()[0]) / 6000.0
                         : inst.domain.diameter() / 100.0;
}

double oracle_step(const Instance& inst, const CommonArgs& c) { return c.grid_step.value_or(default_oracle_step(inst)); }

double landscape_step(const Instance& inst, const CommonArgs& c) {
  if (c.grid_step) return *c.grid_step;
  const double width = (inst.domain.upper() - inst.domain.lower()).maxCoeff();
  return inst.dim() == 1 ? width / 120.0 : width / 40.0;
}

void add_common(CLI::App* sub, CommonArgs& c) {
  sub->add_option("--instance", c.instance, "instance config file")->required();
  sub->add_option("--seed", c.seed, "root seed (default from PERFLAB_SEED, else 0)")->envname("PERFLAB_SEED");
  sub->add_option("--samples", c.samples, "Monte Carlo sample size")->check(CLI::PositiveNumber);
  sub->add_option("--grid-step", c.grid_step, "grid spacing for the landscape or the PR oracle")
      ->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "output directory");
  sub->add_flag("--closed-form", c.closed_form, "evaluate expectations exactly (Gaussian + squared loss only)");
}

// Canonical argument list recorded in the manifest: every resolved value is
// explicit, so replay does not depend on the environment. --out is omitted.
std::vector<std::string> common_argv(const std::string& command, const CommonArgs& c) {
  std::vector<std::string> a{command, "--instance", c.instance, "--seed", std::to_string(c.seed), "--samples",
                             std::to_string(c.samples)};
  if (c.grid_step) a.insert(a.end(), {"--grid-step", format_number(*c.grid_step)});
  if (c.closed_form) a.emplace_back("--closed-form");
  return a;
}

json common_parameters(const CommonArgs& c) {
  json p = {{"seed", c.seed},
            {"samples", c.samples},
            {"mode", c.closed_form ? "closed_form" : "monte_carlo"},
            {"grid_step", c.grid_step ? json_number(*c.grid_step) : json(nullptr)}};
  return p;
}

void write_manifest(const fs::path& dir, const std::string& stem, const std::string& command, const CommonArgs& c,
                    const std::string& instance_bytes, json parameters, std::vector<std::string> argv,
                    const std::vector<std::string>& outputs, double wall_time) {
  json m = {{"tool", "perflab"},
            {"tool_version", kToolVersion},
            {"command", command},
            {"instance_path", c.instance},
            {"instance_hash", content_hash(instance_bytes)},
            {"seed", c.seed},
            {"parameters", std::move(parameters)},
            {"argv", std::move(argv)},
            {"outputs", outputs},
            {"wall_time_s", json_number(wall_time)}};
  write_file(dir / (stem + ".manifest.json"), dump(m));
}

struct Loaded {
  Instance inst;
  std::string bytes;
};

Loaded load(CommonArgs& c) {
  std::error_code ec;
  const auto abs = fs::absolute(c.instance, ec);
  if (!ec) c.instance = abs.lexically_normal().string();
  Loaded l;
  l.bytes = read_file(c.instance);
  l.inst = load_instance(l.bytes);
  return l;
}

// ---- landscape -----------------------------------------------------------

Outcome cmd_landscape(const Instance& inst, const CommonArgs& c, std::ostream& out) {
  if (inst.dim() > 2) throw UnsupportedError("landscape supports d <= 2");
  const auto opts = eval_options(c);
  require_mode(inst, opts);
  const fs::path dir = prepare_out(c.out);
  const double h = landscape_step(inst, c);
  const auto ps = fixed_point_oracle_ps(inst, opts);

  std::vector<LandscapeRow> rows;
  for (const auto& theta : grid_points(inst.domain, h)) {
    rows.push_back({theta, pr(inst, theta, opts), dpr(inst, ps.theta_star, theta, opts).value});
  }
  const auto best = std::min_element(rows.begin(), rows.end(),
                                     [](const LandscapeRow& a, const LandscapeRow& b) { return a.pr.value < b.pr.value; });
  // --grid-step sets the landscape spacing here, not the oracle's
  const auto po = grid_oracle_po(inst, default_oracle_step(inst), opts);

  std::ostringstream csv;
  write_landscape_csv(csv, rows);
  write_file(dir / "landscape.csv", csv.str());
  json summary = {{"instance", inst.name},
                  {"grid_step", json_number(h)},
                  {"rows", rows.size()},
                  {"landscape_min", {{"theta", json_vector(best->theta)}, {"pr", json_number(best->pr.value)}}},
                  {"theta_ps", to_json(ps)},
                  {"theta_po", to_json(po)}};
  write_file(dir / "landscape_summary.json", dump(summary));

  out << "landscape: " << rows.size() << " rows, grid step " << format_number(h) << "\n"
      << "  minimum on grid at " << show(best->theta) << ", PR " << format_number(best->pr.value) << "\n"
      << "  theta_PS " << show(ps.theta_star) << ", theta_PO " << show(po.theta_star) << "\n";
  return {kExitOk, {"landscape.csv", "landscape_summary.json"}};
}

// ---- solve ---------------------------------------------------------------

Outcome cmd_solve(const Instance& inst, const CommonArgs& c, const SolveArgs& s, std::ostream& out) {
  const auto opts = eval_options(c);
  require_mode(inst, opts);
  Theta theta0 = inst.domain.center();
  if (!s.theta0.empty()) {
    if (s.theta0.size() != inst.dim()) throw UsageError("--theta0 needs " + std::to_string(inst.dim()) + " values");
    theta0 = Eigen::Map<const Vector>(s.theta0.data(), static_cast<Eigen::Index>(s.theta0.size()));
  }
  const fs::path dir = prepare_out(c.out);

  std::optional<OracleResult> grid;
  if (inst.dim() <= 2) grid = grid_oracle_po(inst, oracle_step(inst, c), opts);
  const auto fixed = fixed_point_oracle_ps(inst, opts);
  auto oracles = json::object();
  oracles["grid"] = grid ? to_json(*grid) : json(nullptr);
  oracles["fixed_point"] = to_json(fixed);

  if (s.method == "oracle") {
    json summary = {{"method", "oracle"}, {"instance", inst.name}, {"oracles", oracles}};
    write_file(dir / "summary_oracle.json", dump(summary));
    if (grid) {
      out << "grid oracle:        theta_PO " << show(grid->theta_star) << ", PR " << format_number(grid->objective)
          << ", step " << format_number(grid->grid_step) << "\n";
    }
    out << "fixed-point oracle: theta_PS " << show(fixed.theta_star) << ", residual " << format_number(fixed.residual)
        << (fixed.conclusive ? "" : " (inconclusive)") << "\n";
    return {kExitOk, {"summary_oracle.json"}};
  }

  Trajectory t;
  if (s.method == "rrm") {
    t = rrm(inst, theta0, s.max_iters.value_or(100), opts, s.tol);
  } else {
    const double step = s.step.value_or(default_step(inst));
    const std::size_t iters = s.max_iters.value_or(10000);
    t = s.method == "rgd" ? rgd(inst, theta0, step, iters, opts, s.tol) : pgd(inst, theta0, step, iters, opts, s.tol);
  }
  std::ostringstream csv;
  write_trajectory_csv(csv, t);
  const std::string csv_name = "trajectory_" + s.method + ".csv";
  const std::string summary_name = "summary_" + s.method + ".json";
  write_file(dir / csv_name, csv.str());

  const Theta& fin = t.final_theta();
  json summary = {{"method", s.method},
                  {"instance", inst.name},
                  {"stop_reason", std::string(to_string(t.stop_reason))},
                  {"iterations", t.iterates.size() - 1},
                  {"step_size", json_number(t.step_size)},
                  {"final_theta", json_vector(fin)},
                  {"final_pr", json_number(t.pr_values.back().value)},
                  {"final_pr_stderr", json_number(t.pr_values.back().std_err)},
                  {"distance_to_po", grid ? json_number((fin - grid->theta_star).norm()) : json(nullptr)},
                  {"distance_to_ps", json_number((fin - fixed.theta_star).norm())},
                  {"oracles", oracles}};
  write_file(dir / summary_name, dump(summary));
  out << s.method << ": " << to_string(t.stop_reason) << " after " << t.iterates.size() - 1 << " iterations\n"
      << "  final theta " << show(fin) << ", PR " << format_number(t.pr_values.back().value) << "\n";
  return {kExitOk, {csv_name, summary_name}};
}

// ---- verify --------------------------------------------------------------

Outcome cmd_verify(const Instance& inst, const CommonArgs& c, const VerifyArgs& v, std::ostream& out) {
  std::vector<Condition> wanted;
  for (const auto& name : v.conditions) {
    const auto cond = parse_condition(name);
    if (!cond) throw UsageError("unknown condition '" + name + "'");
    if (*cond == Condition::WEAK_CVX_AT_PO) throw UsageError("weak_cvx_at_po is tested by --theorem 1");
    wanted.push_back(*cond);
  }
  if (wanted.empty() && !v.chain && v.theorem == 0) throw UsageError("verify needs --conditions, --chain or --theorem");
  const auto opts = eval_options(c);
  require_mode(inst, opts);
  const fs::path dir = prepare_out(c.out);
  ProbeSpec probes;
  probes.seed = c.seed;

  auto needs_target = [](Condition k) {
    return k == Condition::SC || k == Condition::WSC || k == Condition::RSI || k == Condition::PL ||
           k == Condition::QG || k == Condition::MIXDOM;
  };
  std::optional<Theta> anchor;
  if (v.chain || std::any_of(wanted.begin(), wanted.end(), needs_target)) {
    anchor = v.anchor == "ps" ? fixed_point_oracle_ps(inst, opts).theta_star : locate_optimum(inst, opts);
  }
  std::optional<Target> target;
  auto get_target = [&]() -> const Target& {
    if (!target) target = v.target == "pr" ? pr_target(inst, *anchor, opts) : dpr_target(inst, *anchor, opts);
    return *target;
  };

  bool violated = false;
  auto note = [&](const ConditionReport& r) {
    violated = violated || r.verdict == Verdict::violated;
    out << "  " << to_string(r.condition) << (r.variant.empty() ? "" : "/" + r.variant) << ": "
        << to_string(r.verdict) << ", best constant " << format_number(r.best_constant) << "\n";
  };

  json doc = {{"instance", inst.name}};
  if (anchor) doc["anchor"] = {{"kind", v.anchor}, {"theta", json_vector(*anchor)}, {"target", v.target}};
  auto reports = json::array();
  for (const auto cond : wanted) {
    std::vector<ConditionReport> rs;
    switch (cond) {
      case Condition::SMOOTH:
      case Condition::LIPZ:
        rs.push_back(check_loss_assumption(inst, cond, v.loss_probes, opts));
        break;
      case Condition::SENS:
        rs.push_back(check_sensitivity(inst, v.pairs, opts));
        break;
      case Condition::MIXDOM:
        rs = check_mixture_dominance(inst, *anchor, v.segments, opts);
        break;
      default: {
        std::optional<double> declared;
        if (v.target == "dpr") {
          if (cond == Condition::WSC) declared = inst.declared.mu_wsc;
          if (cond == Condition::RSI) declared = inst.declared.mu_rsi;
          if (cond == Condition::QG) declared = inst.declared.gamma_qg;
        }
        rs.push_back(check_condition(get_target(), cond, probes, declared));
      }
    }
    for (const auto& r : rs) {
      note(r);
      reports.push_back(to_json(r));
    }
  }
  doc["conditions"] = reports;

  if (v.chain) {
    const auto audit = chain_audit(get_target(), probes);
    out << "chain audit (" << (audit.monotone ? "monotone" : "NOT monotone") << "):\n";
    for (const auto& r : audit.reports) note(r);
    if (!audit.monotone) out << "  " << audit.diagnostic << "\n";
    doc["chain"] = to_json(audit);
  }
  if (v.theorem != 0) {
    const auto rep = v.theorem == 1 ? validate_theorem1(inst, opts, probes) : validate_theorem2(inst, opts, probes);
    violated = violated || rep.status == TheoremStatus::violated;
    out << "theorem " << v.theorem << ": " << to_string(rep.status) << ", key quantity "
        << format_number(rep.key_quantity) << "\n";
    if (!rep.note.empty()) out << "  " << rep.note << "\n";
    doc["theorem"] = to_json(rep);
  }
  write_file(dir / "reports.json", dump(doc));
  return {violated ? kExitViolated : kExitOk, {"reports.json"}};
}

// ---- certify -------------------------------------------------------------

Outcome cmd_certify(const Instance& inst, const CommonArgs& c, std::ostream& out, std::ostream& err) {
  const auto opts = eval_options(c);
  require_mode(inst, opts);
  const fs::path dir = prepare_out(c.out);
  BoundsOptions b;
  b.grid_step = c.grid_step;
  b.probes.seed = c.seed;
  if (opts.mode == EvalMode::monte_carlo) b.stable_tol = 1e-3;

  CertificationRun run;
  try {
    run = certify_all(inst, opts, b);
  } catch (const ContractError& e) {
    err << "certify: " << e.what() << "\n";
    return {kExitInconclusive, {}};
  }
  const auto ratio = shift_gradient_ratio(inst, run.stable.theta_star, opts, b.probes);
  auto certs = json::array();
  int code = kExitOk;
  for (const auto& cert : run.certificates) {
    certs.push_back(to_json(cert));
    if (cert.name == CertificateName::PROP1_OPTIMALITY) {
      // failing premise means no claim, which is a valid outcome
      out << to_string(cert.name) << ": " << (cert.holds ? "optimality certified" : "no optimality claim") << " ("
          << cert.n_failing << " of " << cert.n_probes << " probes fail the premise)\n";
      continue;
    }
    out << to_string(cert.name) << ": " << to_string(cert.status) << " (bound " << format_number(cert.bound_value)
        << ", actual " << format_number(cert.actual_value) << ")\n";
    if (cert.status == CertificateStatus::fails) code = kExitViolated;
    if (cert.status == CertificateStatus::inconclusive && code == kExitOk) code = kExitInconclusive;
  }
  json doc = {{"instance", inst.name},
              {"theta_ps", to_json(run.stable)},
              {"ground_truth",
               {{"theta_po", json_vector(run.truth.theta_po)},
                {"pr_min", json_number(run.truth.pr_min)},
                {"grid_step", json_number(run.truth.grid_step)}}},
              {"certificates", certs},
              {"shift_gradient_ratio",
               {{"max_ratio", json_number(ratio.max_ratio)},
                {"argmax", json_vector(ratio.argmax)},
                {"median_ratio", json_number(ratio.median_ratio)},
                {"n_probes", ratio.n_probes},
                {"n_skipped", ratio.n_skipped}}}};
  write_file(dir / "certificates.json", dump(doc));
  return {code, {"certificates.json"}};
}

// ---- dispatch ------------------------------------------------------------

int report_error(std::ostream& err, int code, const std::string& what) {
  err << "perflab: " << what << "\n";
  return code;
}

int replay(const ReplayArgs& r, std::ostream& out, std::ostream& err);

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical lab for performative prediction", "perflab"};
  app.require_subcommand(1);
  CommonArgs common;
  SolveArgs solve;
  VerifyArgs verify;
  ReplayArgs rep;

  auto* landscape_cmd = app.add_subcommand("landscape", "tabulate PR and DPR(theta_PS, .) over a grid");
  add_common(landscape_cmd, common);

  auto* solve_cmd = app.add_subcommand("solve", "run a solver or the oracles");
  add_common(solve_cmd, common);
  solve_cmd->add_option("--method", solve.method, "rrm, rgd, pgd or oracle")
      ->required()
      ->check(CLI::IsMember({"rrm", "rgd", "pgd", "oracle"}));
  solve_cmd->add_option("--theta0", solve.theta0, "start point, comma separated (default: box centre)")
      ->delimiter(',');
  solve_cmd->add_option("--max-iters", solve.max_iters, "outer iteration cap");
  solve_cmd->add_option("--step", solve.step, "step size for rgd/pgd")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--tol", solve.tol, "stopping tolerance")->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "check conditions, the implication chain or a theorem");
  add_common(verify_cmd, common);
  verify_cmd->add_option("--conditions", verify.conditions, "comma separated: smooth,lipz,sens,mixdom,sc,wsc,rsi,pl,qg")
      ->delimiter(',');
  verify_cmd->add_flag("--chain", verify.chain, "run SC, WSC, RSI, PL, QG on one target and audit monotonicity");
  verify_cmd->add_option("--theorem", verify.theorem, "validate theorem 1 or 2")->check(CLI::IsMember({1, 2}));
  verify_cmd->add_option("--anchor", verify.anchor, "anchor of the target: po or ps")->check(CLI::IsMember({"po", "ps"}));
  verify_cmd->add_option("--target", verify.target, "dpr (DPR(anchor, .)) or pr")->check(CLI::IsMember({"dpr", "pr"}));
  verify_cmd->add_option("--pairs", verify.pairs, "theta pairs for sens");
  verify_cmd->add_option("--segments", verify.segments, "segments for mixdom");
  verify_cmd->add_option("--loss-probes", verify.loss_probes, "probes for smooth and lipz");

  auto* certify_cmd = app.add_subcommand("certify", "issue the optimality certificate and the three example bounds");
  add_common(certify_cmd, common);

  auto* replay_cmd = app.add_subcommand("replay", "rerun the command recorded in a manifest");
  replay_cmd->add_option("--manifest", rep.manifest, "manifest file")->required();
  replay_cmd->add_option("--out", rep.out, "output directory (default: the manifest's directory)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (replay_cmd->parsed()) return replay(rep, out, err);

  const auto start = std::chrono::steady_clock::now();
  auto loaded = load(common);
  const Instance& inst = loaded.inst;

  std::string command;
  std::string stem;
  std::vector<std::string> argv;
  json params = common_parameters(common);
  Outcome outcome;
  if (landscape_cmd->parsed()) {
    command = stem = "landscape";
    argv = common_argv(command, common);
    outcome = cmd_landscape(inst, common, out);
  } else if (solve_cmd->parsed()) {
    command = "solve";
    stem = "solve_" + solve.method;
    argv = common_argv(command, common);
    argv.insert(argv.end(), {"--method", solve.method});
    params["method"] = solve.method;
    if (!solve.theta0.empty()) {
      std::string joined;
      for (std::size_t i = 0; i < solve.theta0.size(); ++i) joined += (i ? "," : "") + format_number(solve.theta0[i]);
      argv.push_back("--theta0=" + joined);
      params["theta0"] = solve.theta0;
    }
    if (solve.max_iters) {
      argv.insert(argv.end(), {"--max-iters", std::to_string(*solve.max_iters)});
      params["max_iters"] = *solve.max_iters;
    }
    if (solve.step) {
      argv.insert(argv.end(), {"--step", format_number(*solve.step)});
      params["step"] = json_number(*solve.step);
    }
    if (solve.tol) {
      argv.insert(argv.end(), {"--tol", format_number(*solve.tol)});
      params["tol"] = json_number(*solve.tol);
    }
    outcome = cmd_solve(inst, common, solve, out);
  } else if (verify_cmd->parsed()) {
    command = stem = "verify";
    argv = common_argv(command, common);
    if (!verify.conditions.empty()) {
      std::string joined;
      for (std::size_t i = 0; i < verify.conditions.size(); ++i) joined += (i ? "," : "") + verify.conditions[i];
      argv.insert(argv.end(), {"--conditions", joined});
    }
    if (verify.chain) argv.emplace_back("--chain");
    if (verify.theorem) argv.insert(argv.end(), {"--theorem", std::to_string(verify.theorem)});
    argv.insert(argv.end(), {"--anchor", verify.anchor, "--target", verify.target, "--pairs",
                             std::to_string(verify.pairs), "--segments", std::to_string(verify.segments),
                             "--loss-probes", std::to_string(verify.loss_probes)});
    params["conditions"] = verify.conditions;
    params["chain"] = verify.chain;
    params["theorem"] = verify.theorem;
    params["anchor"] = verify.anchor;
    params["target"] = verify.target;
    params["pairs"] = verify.pairs;
    params["segments"] = verify.segments;
    params["loss_probes"] = verify.loss_probes;
    outcome = cmd_verify(inst, common, verify, out);
  } else {
    command = stem = "certify";
    argv = common_argv(command, common);
    outcome = cmd_certify(inst, common, out, err);
  }

  if (!outcome.outputs.empty()) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(fs::path(common.out), stem, command, common, loaded.bytes, params, argv, outcome.outputs, wall);
  }
  return outcome.code;
}

int replay(const ReplayArgs& r, std::ostream& out, std::ostream& err) {
  const json m = json::parse(read_file(r.manifest), nullptr, false);
  if (m.is_discarded() || !m.contains("argv") || !m["argv"].is_array()) {
    return report_error(err, kExitUsage, "not a perflab manifest: " + r.manifest);
  }
  if (m.value("tool_version", "") != kToolVersion) {
    err << "perflab: warning: manifest written by version " << m.value("tool_version", "?") << "\n";
  }
  const std::string instance = m.value("instance_path", "");
  if (content_hash(read_file(instance)) != m.value("instance_hash", "")) {
    return report_error(err, kExitIo, "instance file changed since the manifest was written: " + instance);
  }
  auto args = m["argv"].get<std::vector<std::string>>();
  if (!args.empty() && args.front() == "replay") return report_error(err, kExitUsage, "manifest records a replay");
  const std::string dir = r.out.value_or(fs::path(r.manifest).parent_path().string());
  args.insert(args.end(), {"--out", dir.empty() ? "." : dir});
  return dispatch(args, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    return report_error(err, kExitUsage, e.what());
  } catch (const ConfigError& e) {
    return report_error(err, kExitUsage, e.what());
  } catch (const UnsupportedError& e) {
    return report_error(err, kExitUsage, e.what());
  } catch (const IoError& e) {
    return report_error(err, kExitIo, e.what());
  } catch (const DivergenceError& e) {
    return report_error(err, kExitInconclusive, e.what());
  } catch (const ContractError& e) {
    return report_error(err, kExitUsage, e.what());
  } catch (const std::exception& e) {
    return report_error(err, 1, e.what());
  }
}

}  // namespace perflab
