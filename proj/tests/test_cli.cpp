#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "perflab/cli.hpp"
#include "perflab/serialize.hpp"

using namespace perflab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCanonical = std::string(PERFLAB_CONFIG_DIR) + "/gauss-mean-1d.ini";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("perflab_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

CsvTable read_table(const fs::path& p) {
  std::ifstream in(p);
  return read_csv(in);
}

fs::path write_config(const std::string& name, const std::string& extra) {
  const fs::path p = fs::temp_directory_path() / (name + ".ini");
  std::ofstream os(p);
  os << slurp(kCanonical) << extra;
  return p;
}

}  // namespace

TEST_CASE("numbers print with twelve significant digits") {
  CHECK(format_number(1.0 / 3) == "0.333333333333");
  CHECK(format_number(1.75) == "1.75");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(json_number(2.0 / 3).dump() == "0.666666666667");
  CHECK(json_number(INFINITY).is_null());
}

TEST_CASE("csv round trip and schema check") {
  Trajectory t;
  t.iterates = {testing::scalar(0.0), testing::scalar(0.5)};
  t.pr_values = {RiskEstimate{2.0, 0.1, 10}, RiskEstimate{1.5, 0.05, 10}};
  t.grad_norms = {1.0, 0.25};
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  const auto table = read_csv(ss);
  CHECK(table.columns == std::vector<std::string>{"iter", "theta_0", "pr_value", "pr_stderr", "grad_norm"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[1] == std::vector<double>{1, 0.5, 1.5, 0.05, 0.25});

  std::stringstream bad("# perflab-schema v2\na,b\n1,2\n");
  CHECK_THROWS_AS(read_csv(bad), ContractError);
  std::stringstream ragged(std::string(kSchemaLine) + "\na,b\n1\n");
  CHECK_THROWS_AS(read_csv(ragged), ContractError);
}

TEST_CASE("landscape: grid cardinality, minimum near the optimum, schema") {
  const auto dir = fresh_dir("landscape");
  auto r = cli({"landscape", "--instance", kCanonical, "--grid-step", "0.5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto table = read_table(dir / "landscape.csv");
  CHECK(table.columns == std::vector<std::string>{"theta_0", "pr", "pr_stderr", "dpr_at_ps"});
  CHECK(table.rows.size() == 13);
  CHECK(table.rows.front()[0] == -3.0);
  CHECK(table.rows.back()[0] == 3.0);
  CHECK(fs::exists(dir / "landscape.manifest.json"));

  r = cli({"landscape", "--instance", kCanonical, "--closed-form", "--out", dir.string()});
  REQUIRE(r.code == 0);
  table = read_table(dir / "landscape.csv");
  std::size_t best = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (table.rows[i][1] < table.rows[best][1]) best = i;
  CHECK(std::abs(table.rows[best][0] - 2.0 / 3) <= 0.05);
  for (const auto& row : table.rows) CHECK(row[2] == 0.0);
  const auto summary = read_json(dir / "landscape_summary.json");
  CHECK(summary["theta_ps"]["theta"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(summary["theta_po"]["theta"][0].get<double>() == doctest::Approx(2.0 / 3).epsilon(2e-3));
}

TEST_CASE("solve writes trajectories and summaries") {
  const auto dir = fresh_dir("solve");
  auto r = cli({"solve", "--instance", kCanonical, "--method", "rrm", "--closed-form", "--out", dir.string()});
  REQUIRE(r.code == 0);
  auto s = read_json(dir / "summary_rrm.json");
  CHECK(s["final_theta"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(s["stop_reason"] == "converged");
  CHECK(s["distance_to_ps"].get<double>() <= 1e-4);
  const auto traj = read_table(dir / "trajectory_rrm.csv");
  CHECK(traj.columns.front() == "iter");
  CHECK(traj.rows.size() == s["iterations"].get<std::size_t>() + 1);

  r = cli({"solve", "--instance", kCanonical, "--method", "pgd", "--closed-form", "--out", dir.string()});
  REQUIRE(r.code == 0);
  s = read_json(dir / "summary_pgd.json");
  CHECK(s["final_theta"][0].get<double>() == doctest::Approx(2.0 / 3).epsilon(1e-3));
  CHECK(s["distance_to_po"].get<double>() <= 2e-3);

  r = cli({"solve", "--instance", kCanonical, "--method", "rgd", "--theta0=-2", "--closed-form", "--out",
           dir.string()});
  REQUIRE(r.code == 0);
  CHECK(read_table(dir / "trajectory_rgd.csv").rows.front()[1] == -2.0);

  r = cli({"solve", "--instance", kCanonical, "--method", "oracle", "--closed-form", "--out", dir.string()});
  REQUIRE(r.code == 0);
  s = read_json(dir / "summary_oracle.json");
  CHECK(s["oracles"]["grid"]["method"] == "grid");
  CHECK(s["oracles"]["fixed_point"]["method"] == "fixed_point");
  CHECK(r.out.find("grid oracle") != std::string::npos);
  CHECK(r.out.find("fixed-point oracle") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = fresh_dir("usage");
  CHECK(cli({"solve", "--instance", kCanonical, "--method", "newton", "--out", dir.string()}).code == 2);
  CHECK(cli({"verify", "--instance", kCanonical, "--conditions", "sc,nonsense", "--out", dir.string()}).code == 2);
  CHECK(cli({"verify", "--instance", kCanonical, "--out", dir.string()}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"solve", "--method", "rrm"}).code == 2);
  CHECK(cli({"solve", "--instance", kCanonical, "--method", "rrm", "--theta0=1,2", "--out", dir.string()}).code == 2);
  const auto logistic = std::string(PERFLAB_CONFIG_DIR) + "/strategic-logistic-2d.ini";
  CHECK(cli({"landscape", "--instance", logistic, "--closed-form", "--out", dir.string()}).code == 2);
  CHECK(cli({"solve", "--help"}).code == 0);
}

TEST_CASE("i/o errors exit with 5") {
  const auto dir = fresh_dir("io");
  CHECK(cli({"solve", "--instance", "/nonexistent/x.ini", "--method", "rrm", "--out", dir.string()}).code == 5);
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  const auto r = cli({"solve", "--instance", kCanonical, "--method", "rrm", "--closed-form", "--out",
                      (dir / "file" / "sub").string()});
  CHECK(r.code == 5);
  CHECK(r.err.find("file") != std::string::npos);
}

TEST_CASE("verify reports and exit codes") {
  const auto dir = fresh_dir("verify");
  auto r = cli({"verify", "--instance", kCanonical, "--conditions", "sens,mixdom", "--samples", "2000", "--out",
                dir.string()});
  CHECK(r.code == 0);
  auto doc = read_json(dir / "reports.json");
  REQUIRE(doc["conditions"].size() == 3);
  for (const auto& c : doc["conditions"]) CHECK(c["verdict"] == "certified");

  r = cli({"verify", "--instance", kCanonical, "--chain", "--closed-form", "--out", dir.string()});
  CHECK(r.code == 0);
  doc = read_json(dir / "reports.json");
  CHECK(doc["chain"]["monotone"] == true);
  CHECK(doc["chain"]["reports"].size() == 5);

  const auto stable = std::string(PERFLAB_CONFIG_DIR) + "/gauss-mean-1d-stable.ini";
  r = cli({"verify", "--instance", stable, "--theorem", "1", "--closed-form", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(read_json(dir / "reports.json")["theorem"]["status"] == "certified");

  const auto declared = write_config("perflab_eps01", "\n[constants]\neps = 0.1\n");
  r = cli({"verify", "--instance", declared.string(), "--conditions", "sens", "--samples", "2000", "--out",
           dir.string()});
  CHECK(r.code == 3);
  doc = read_json(dir / "reports.json");
  CHECK(doc["conditions"][0]["verdict"] == "violated");
  CHECK_FALSE(doc["conditions"][0]["witnesses"].empty());
}

TEST_CASE("certify emits all four certificates") {
  const auto dir = fresh_dir("certify");
  auto r = cli({"certify", "--instance", kCanonical, "--closed-form", "--out", dir.string()});
  CHECK(r.code == 0);
  auto doc = read_json(dir / "certificates.json");
  REQUIRE(doc["certificates"].size() == 4);
  CHECK(doc["certificates"][0]["name"] == "PROP1_OPTIMALITY");
  CHECK(doc["certificates"][0]["holds"] == false);
  for (int i = 1; i < 4; ++i) CHECK(doc["certificates"][i]["holds"] == true);
  CHECK(doc["certificates"][1]["constants"]["L"]["source"] == "analytic");

  const auto statics = std::string(PERFLAB_CONFIG_DIR) + "/gauss-static-1d.ini";
  r = cli({"certify", "--instance", statics, "--closed-form", "--out", dir.string()});
  CHECK(r.code == 0);
  doc = read_json(dir / "certificates.json");
  for (const auto& c : doc["certificates"]) CHECK(c["holds"] == true);
}

TEST_CASE("certify exits 4 when a bound cannot be decided") {
  const auto dir = fresh_dir("certify_inconclusive");
  const auto cfg = write_config("perflab_no_growth", "\n[constants]\ngamma_qg = 0\n");
  const auto r = cli({"certify", "--instance", cfg.string(), "--closed-form", "--out", dir.string()});
  CHECK(r.code == 4);
  const auto doc = read_json(dir / "certificates.json");
  CHECK(doc["certificates"][2]["status"] == "inconclusive");
  CHECK(doc["certificates"][1]["holds"] == true);
}

TEST_CASE("PERFLAB_SEED supplies the default seed") {
  const auto dir = fresh_dir("seed");
  ::setenv("PERFLAB_SEED", "77", 1);
  auto r = cli({"solve", "--instance", kCanonical, "--method", "rrm", "--samples", "500", "--out", dir.string()});
  ::unsetenv("PERFLAB_SEED");
  REQUIRE(r.code == 0);
  CHECK(read_json(dir / "solve_rrm.manifest.json")["seed"] == 77);
  const auto with_env = slurp(dir / "trajectory_rrm.csv");
  r = cli({"solve", "--instance", kCanonical, "--method", "rrm", "--samples", "500", "--seed", "77", "--out",
           dir.string()});
  CHECK(slurp(dir / "trajectory_rrm.csv") == with_env);
}

TEST_CASE("replaying a manifest reproduces every output byte for byte") {
  const std::vector<std::vector<std::string>> commands = {
      {"landscape", "--instance", kCanonical, "--samples", "2000", "--grid-step", "0.25"},
      {"solve", "--instance", kCanonical, "--method", "rrm", "--samples", "2000", "--seed", "3"},
      {"solve", "--instance", kCanonical, "--method", "pgd", "--samples", "2000", "--seed", "3", "--max-iters", "50"},
      {"solve", "--instance", kCanonical, "--method", "oracle", "--samples", "1000", "--grid-step", "0.01"},
      {"verify", "--instance", kCanonical, "--conditions", "sens,mixdom,rsi", "--chain", "--samples", "1000"},
      {"certify", "--instance", kCanonical, "--samples", "1000", "--grid-step", "0.01"},
  };
  const auto first = fresh_dir("replay_a");
  const auto second = fresh_dir("replay_b");
  for (auto args : commands) {
    CAPTURE(args[0]);
    args.insert(args.end(), {"--out", first.string()});
    const int code = cli(args).code;
    CHECK((code == 0 || code == 3 || code == 4));
  }
  std::size_t manifests = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    const auto name = entry.path().filename().string();
    if (name.find(".manifest.json") == std::string::npos) continue;
    ++manifests;
    CAPTURE(name);
    const auto m = read_json(entry.path());
    cli({"replay", "--manifest", entry.path().string(), "--out", second.string()});
    for (const auto& out : m["outputs"]) {
      const std::string file = out.get<std::string>();
      CAPTURE(file);
      CHECK(slurp(first / file) == slurp(second / file));
    }
    auto again = read_json(second / name);
    auto orig = m;
    again.erase("wall_time_s");
    orig.erase("wall_time_s");
    CHECK(again == orig);
  }
  CHECK(manifests == commands.size());
}

TEST_CASE("replay refuses a changed instance") {
  const auto dir = fresh_dir("replay_changed");
  const auto cfg = write_config("perflab_changing", "");
  REQUIRE(cli({"solve", "--instance", cfg.string(), "--method", "rrm", "--closed-form", "--out", dir.string()}).code ==
          0);
  std::ofstream(cfg, std::ios::app) << "\n# edited\n";
  CHECK(cli({"replay", "--manifest", (dir / "solve_rrm.manifest.json").string()}).code == 5);
}
