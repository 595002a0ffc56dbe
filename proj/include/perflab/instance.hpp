#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "perflab/core.hpp"
#include "perflab/distmaps.hpp"
#include "perflab/losses.hpp"

namespace perflab {

/// A complete performative problem: loss, distribution map, parameter box and
/// whatever constants the author chose to declare. Immutable after loading.
struct Instance {
  std::string name;
  ParamBox domain;
  LossSpec loss;
  DistMapSpec map;
  ConstantSet declared;

  /// Dotted field paths that were filled from defaults during loading.
  std::vector<std::string> defaults_applied;

  [[nodiscard]] std::size_t dim() const { return domain.dim(); }
  [[nodiscard]] std::size_t data_dim() const { return map.data_dim(); }

  /// Cross-checks loss, map and domain shapes. Throws ConfigError.
  void validate() const;

  /// Structural equality; `defaults_applied` is provenance and not compared.
  bool operator==(const Instance& other) const;
};

/// Raised by load_instance. `field` is a dotted path such as "map.sigma";
/// `line` is set for syntax errors and 0 otherwise.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::size_t line, const std::string& message);
  [[nodiscard]] const std::string& field() const { return field_; }
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

/// Parses the INI-style instance config.
///
///   name = gauss-mean-1d
///   [domain]      lower, upper                    (comma-separated vectors)
///   [loss]        kind, lambda
///   [map]         kind, base_mean, shift, sigma, cost, label_weights
///                 (shift rows are separated by ';', entries by ',')
///   [constants]   beta, gamma_sc, lip_L, eps, mu_wsc, mu_rsi, gamma_qg, shift_bound_B
///
/// Unknown sections and keys are rejected.
Instance load_instance(std::string_view config_text);
Instance load_instance_file(const std::string& path);

/// Writes every field explicitly with round-trip precision.
std::string serialize_instance(const Instance& instance);

}  // namespace perflab
