#pragma once

// Shared vocabulary for the performative-prediction lab: parameter vectors,
// the box-shaped parameter domain, declared constants, hierarchical seeds and
// the error types used by every module.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace perflab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Model parameters. Always a column vector of length d >= 1.
using Theta = Vector;

/// A precondition of a public operation was not met by the caller.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The requested operation has no implementation for this map/loss combination.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constant required by a bound or validator is neither declared nor estimated.
class MissingConstantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver blew up.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned box [lower, upper] in R^k. Used for the parameter domain and
/// for data regions over which Lipschitz constants are taken.
class Box {
 public:
  Box() = default;
  Box(Vector lower, Vector upper);

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(lower_.size()); }
  [[nodiscard]] const Vector& lower() const { return lower_; }
  [[nodiscard]] const Vector& upper() const { return upper_; }
  [[nodiscard]] bool contains(const Vector& x, double slack = 0.0) const;
  [[nodiscard]] double diameter() const { return (upper_ - lower_).norm(); }
  [[nodiscard]] Vector center() const { return 0.5 * (lower_ + upper_); }

  bool operator==(const Box& other) const;

 private:
  Vector lower_;
  Vector upper_;
};

using ParamBox = Box;

/// Euclidean projection onto the box (componentwise clamp).
Theta project(const Theta& theta, const Box& box);

/// Uniform draw inside the box.
Theta uniform_point(const Box& box, std::mt19937_64& rng);

/// Evenly spaced 1-D grid of `count` points over [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Constants of the structural assumptions. Every entry is optional: absent
/// means "not declared", and consumers fall back to analytic or estimated values.
struct ConstantSet {
  std::optional<double> beta;           // smoothness of grad_theta in z
  std::optional<double> gamma_sc;       // strong convexity of the loss in theta
  std::optional<double> lip_L;          // value-Lipschitz constant of the loss in z
  std::optional<double> eps;            // sensitivity of the distribution map
  std::optional<double> mu_wsc;
  std::optional<double> mu_rsi;
  std::optional<double> gamma_qg;       // quadratic growth of the suboptimality gap
  std::optional<double> shift_bound_B;  // absolute bound on W1 between induced distributions

  [[nodiscard]] bool empty() const;
  /// Throws ContractError naming the first negative or non-finite entry.
  void validate() const;

  bool operator==(const ConstantSet&) const = default;
};

enum class ConstantSource { declared, analytic, estimated };
std::string_view to_string(ConstantSource source);

/// A constant value together with where it came from.
struct SourcedConstant {
  double value = 0.0;
  ConstantSource source = ConstantSource::estimated;
};

/// Hierarchical seed. The engine for a spec is a pure function of
/// (root_seed, stream_path); children extend the path by one label.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::vector<std::uint64_t> stream_path;

  [[nodiscard]] SeedSpec child(std::uint64_t label) const;
  [[nodiscard]] std::uint64_t stream_key() const;
  [[nodiscard]] std::mt19937_64 engine() const;

  bool operator==(const SeedSpec&) const = default;
};

enum class EvalMode { monte_carlo, closed_form };
std::string_view to_string(EvalMode mode);

/// How expectations are evaluated: Monte Carlo over `n` draws from `seed`, or
/// in closed form where the instance admits one.
struct EvalOptions {
  EvalMode mode = EvalMode::monte_carlo;
  std::size_t n = 10000;
  SeedSpec seed;

  [[nodiscard]] EvalOptions with_seed(SeedSpec s) const {
    EvalOptions copy = *this;
    copy.seed = std::move(s);
    return copy;
  }
  [[nodiscard]] EvalOptions with_n(std::size_t count) const {
    EvalOptions copy = *this;
    copy.n = count;
    return copy;
  }
};

/// Throws ContractError unless a and b have the same length.
void require_same_dim(const Vector& a, const Vector& b, std::string_view what);

}  // namespace perflab
