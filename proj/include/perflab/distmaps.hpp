#pragma once

#include <string_view>

#include "perflab/core.hpp"

namespace perflab {

enum class MapKind { gaussian_location_scale, strategic_response };
std::string_view to_string(MapKind kind);

/// Distribution map D(theta).
///
/// gaussian_location_scale: z = base_mean + shift * theta + sigma .* xi, xi ~ N(0, I_m).
///   `shift` is m x d; `sigma` holds the (diagonal) standard deviations.
///
/// strategic_response: a base population x0 ~ N(base_mean, diag(sigma^2)) in R^d,
///   optionally labelled y in {-1, +1} with P(y = +1 | x0) = sigmoid(label_weights . x0).
///   Each agent best-responds to the deployed theta by minimising
///   theta . x + (cost / 2) ||x - x0||^2, i.e. x = x0 - theta / cost. Labels do not move.
///
/// In both kinds the base draws depend only on the seed, never on theta, so two
/// batches sampled with the same seed at different thetas are coupled
/// (common random numbers).
struct DistMapSpec {
  MapKind kind = MapKind::gaussian_location_scale;
  Vector base_mean;
  Matrix shift;  // gaussian only
  Vector sigma;
  double cost = 1.0;           // strategic only
  Vector label_weights;        // strategic only; empty means unlabelled data

  [[nodiscard]] std::size_t data_dim() const;
  [[nodiscard]] bool has_labels() const { return kind == MapKind::strategic_response && label_weights.size() > 0; }
  [[nodiscard]] bool has_density() const { return kind == MapKind::gaussian_location_scale; }

  /// Throws ContractError on shape or sign violations for parameter dimension d.
  void validate(std::size_t theta_dim) const;

  bool operator==(const DistMapSpec& other) const;
};

/// n draws from D(theta), one per row.
struct SampleBatch {
  Matrix points;
  Theta theta_used;
  SeedSpec seed;

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  [[nodiscard]] Vector point(std::size_t i) const { return points.row(static_cast<Eigen::Index>(i)).transpose(); }
};

SampleBatch sample(const DistMapSpec& map, const Theta& theta, std::size_t n, const SeedSpec& seed);

/// grad_theta log p_theta(z). Gaussian maps only.
Vector score(const DistMapSpec& map, const Vector& z, const Theta& theta);

struct MeanCov {
  Vector mean;
  Vector variance;  // diagonal
};

/// Exact mean and diagonal covariance of D(theta). Gaussian maps only.
MeanCov closed_form_mean_cov(const DistMapSpec& map, const Theta& theta);

/// Operator 2-norm of the linear response of the map to theta. Every supported
/// map is a translation family, so this is the exact sensitivity constant.
double translation_norm(const DistMapSpec& map, std::size_t theta_dim);

/// Per-coordinate box holding the central `coverage` mass of D(theta) for
/// every theta in the parameter box. Closed form uses Gaussian quantiles;
/// Monte Carlo pools samples drawn at the corners and centre of the box.
Box quantile_region(const DistMapSpec& map, const Box& theta_box, double coverage, const EvalOptions& opts);

}  // namespace perflab
