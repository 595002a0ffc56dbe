#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "perflab/bounds.hpp"

namespace perflab {

inline constexpr const char* kSchemaLine = "# perflab-schema v1";

/// Twelve significant digits, shortest form, locale independent. Negative zero
/// prints as "0"; non-finite values as "nan", "inf", "-inf".
std::string format_number(double x);

/// A JSON number holding the value rounded to twelve significant digits, or
/// null when it is not finite.
nlohmann::json json_number(double x);
nlohmann::json json_vector(const Vector& v);

nlohmann::json to_json(const ConditionReport& report);
nlohmann::json to_json(const ChainAudit& audit);
nlohmann::json to_json(const TheoremReport& report);
nlohmann::json to_json(const Certificate& certificate);
nlohmann::json to_json(const OracleResult& oracle);
nlohmann::json to_json(const std::vector<NamedConstant>& constants);

/// Trajectory CSV: iter, theta_0..theta_{d-1}, pr_value, pr_stderr, grad_norm.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

struct LandscapeRow {
  Theta theta;
  RiskEstimate pr;
  double dpr_at_ps = 0.0;
};
/// Landscape CSV: theta_0..theta_{d-1}, pr, pr_stderr, dpr_at_ps.
void write_landscape_csv(std::ostream& os, const std::vector<LandscapeRow>& rows);

/// Parsed CSV in the versioned format. Throws ContractError when the first
/// line is not the schema line or a row has the wrong width.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
CsvTable read_csv(std::istream& is);

/// Pretty JSON with two-space indent and a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace perflab
