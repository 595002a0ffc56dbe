#include "perflab/serialize.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace perflab {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  std::string s(buf, res.ptr);
  // general format keeps trailing zeros in the mantissa; drop them
  const auto exp_pos = s.find('e');
  std::string mantissa = s.substr(0, exp_pos);
  const std::string exponent = exp_pos == std::string::npos ? "" : s.substr(exp_pos);
  if (mantissa.find('.') != std::string::npos) {
    while (mantissa.back() == '0') mantissa.pop_back();
    if (mantissa.back() == '.') mantissa.pop_back();
  }
  return mantissa + exponent;
}

nlohmann::json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  if (x == 0.0) return 0.0;
  const std::string s = format_number(x);
  double rounded = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), rounded);
  return rounded;
}

nlohmann::json json_vector(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json_number(v[i]));
  return arr;
}

nlohmann::json to_json(const std::vector<NamedConstant>& constants) {
  auto obj = nlohmann::json::object();
  for (const auto& c : constants) {
    obj[c.name] = {{"value", json_number(c.constant.value)}, {"source", std::string(to_string(c.constant.source))}};
  }
  return obj;
}

namespace {

nlohmann::json witnesses_json(const std::vector<Witness>& ws) {
  auto arr = nlohmann::json::array();
  for (const auto& w : ws) {
    auto pts = nlohmann::json::array();
    for (const auto& p : w.points) pts.push_back(json_vector(p));
    arr.push_back({{"points", pts}, {"residual", json_number(w.residual)}});
  }
  return arr;
}

void header(std::ostream& os, const std::vector<std::string>& columns) {
  os << kSchemaLine << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
}

std::vector<std::string> theta_columns(std::size_t d) {
  std::vector<std::string> cols;
  for (std::size_t i = 0; i < d; ++i) cols.push_back("theta_" + std::to_string(i));
  return cols;
}

}  // namespace

nlohmann::json to_json(const ConditionReport& r) {
  return {{"condition", std::string(to_string(r.condition))},
          {"variant", r.variant},
          {"verdict", std::string(to_string(r.verdict))},
          {"best_constant", json_number(r.best_constant)},
          {"tested_constant", json_number(r.tested_constant)},
          {"constant_source", std::string(to_string(r.constant_source))},
          {"tolerance", json_number(r.tolerance)},
          {"min_residual", json_number(r.min_residual)},
          {"n_probes", r.n_probes},
          {"probes", r.probe_spec},
          {"note", r.note},
          {"witnesses", witnesses_json(r.witnesses)}};
}

nlohmann::json to_json(const ChainAudit& audit) {
  auto reports = nlohmann::json::array();
  for (const auto& r : audit.reports) reports.push_back(to_json(r));
  return {{"monotone", audit.monotone}, {"diagnostic", audit.diagnostic}, {"reports", reports}};
}

nlohmann::json to_json(const TheoremReport& r) {
  auto probes = nlohmann::json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  return {{"theorem", r.theorem},
          {"status", std::string(to_string(r.status))},
          {"premise",
           {{"theta_po", json_vector(r.theta_po)},
            {"theta_ps", json_vector(r.theta_ps)},
            {"gap", json_number(r.premise_gap)},
            {"tolerance", json_number(r.premise_tol)}}},
          {"constants", to_json(r.constants)},
          {"key_quantity", json_number(r.key_quantity)},
          {"condition_holds", r.condition_holds},
          {"probes", probes},
          {"note", r.note}};
}

nlohmann::json to_json(const Certificate& c) {
  return {{"name", std::string(to_string(c.name))},
          {"status", std::string(to_string(c.status))},
          {"holds", c.holds},
          {"bound_value", json_number(c.bound_value)},
          {"actual_value", json_number(c.actual_value)},
          {"tolerance", json_number(c.tolerance)},
          {"constants", to_json(c.constants)},
          {"n_probes", c.n_probes},
          {"n_failing", c.n_failing},
          {"failing_probes", witnesses_json(c.failing_probes)},
          {"note", c.note}};
}

nlohmann::json to_json(const OracleResult& o) {
  return {{"method", std::string(to_string(o.method))},
          {"theta", json_vector(o.theta_star)},
          {"objective", json_number(o.objective)},
          {"grid_step", json_number(o.grid_step)},
          {"residual", json_number(o.residual)},
          {"contraction_ratio", json_number(o.contraction_ratio)},
          {"conclusive", o.conclusive}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  const std::size_t d = t.iterates.empty() ? 0 : static_cast<std::size_t>(t.iterates.front().size());
  auto cols = theta_columns(d);
  cols.insert(cols.begin(), "iter");
  for (const char* c : {"pr_value", "pr_stderr", "grad_norm"}) cols.emplace_back(c);
  header(os, cols);
  for (std::size_t k = 0; k < t.iterates.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < t.iterates[k].size(); ++i) os << ',' << format_number(t.iterates[k][i]);
    os << ',' << format_number(t.pr_values[k].value) << ',' << format_number(t.pr_values[k].std_err) << ','
       << format_number(t.grad_norms[k]) << '\n';
  }
}

void write_landscape_csv(std::ostream& os, const std::vector<LandscapeRow>& rows) {
  const std::size_t d = rows.empty() ? 0 : static_cast<std::size_t>(rows.front().theta.size());
  auto cols = theta_columns(d);
  for (const char* c : {"pr", "pr_stderr", "dpr_at_ps"}) cols.emplace_back(c);
  header(os, cols);
  for (const auto& r : rows) {
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) os << format_number(r.theta[i]) << ',';
    os << format_number(r.pr.value) << ',' << format_number(r.pr.std_err) << ',' << format_number(r.dpr_at_ps) << '\n';
  }
}

CsvTable read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSchemaLine) throw ContractError("csv: missing '# perflab-schema v1' line");
  CsvTable table;
  if (!std::getline(is, line)) throw ContractError("csv: missing column header");
  std::stringstream hs(line);
  for (std::string col; std::getline(hs, col, ',');) table.columns.push_back(col);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw ContractError("csv: not a number: '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) throw ContractError("csv: row width does not match the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace perflab
