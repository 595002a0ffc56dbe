#pragma once

#include <string_view>

#include "perflab/core.hpp"

namespace perflab {

enum class LossKind { squared_ridge, logistic_ridge };
std::string_view to_string(LossKind kind);

/// Loss l(z; theta).
///
/// squared_ridge:  z in R^d,  l = ||theta - z||^2 + (lambda/2)||theta||^2
/// logistic_ridge: z = (x, y) with x in R^d and y in {-1, +1},
///                 l = log(1 + exp(-y theta.x)) + (lambda/2)||theta||^2
///
/// The feature map is fixed by the kind: squared_ridge ties z coordinate-wise
/// to theta, logistic_ridge reads the first d coordinates as features and the
/// last one as the label.
struct LossSpec {
  LossKind kind = LossKind::squared_ridge;
  double lambda = 0.0;

  /// Data dimension m required by this loss for parameter dimension d.
  [[nodiscard]] std::size_t data_dim(std::size_t theta_dim) const;

  bool operator==(const LossSpec&) const = default;
};

double loss_value(const LossSpec& spec, const Vector& z, const Theta& theta);
Vector grad_theta(const LossSpec& spec, const Vector& z, const Theta& theta);
Vector grad_z(const LossSpec& spec, const Vector& z, const Theta& theta);

/// l(z_i; theta) for every row z_i of `points`.
Vector loss_values(const LossSpec& spec, const Matrix& points, const Theta& theta);

/// grad_theta l(z_i; theta) for every row, one gradient per row.
Matrix grad_theta_rows(const LossSpec& spec, const Matrix& points, const Theta& theta);

/// Constants of the loss over a bounded region Theta x Z.
///
/// lip_value is sup ||grad_z l|| over the region (the value-Lipschitz constant,
/// the one Kantorovich-Rubinstein arguments need); lip_grad is the Lipschitz
/// constant of grad_z l in z.
struct LossConstants {
  double beta = 0.0;
  double gamma_sc = 0.0;
  double lip_value = 0.0;
  double lip_grad = 0.0;
  ConstantSource source = ConstantSource::analytic;
  Box theta_region;
  Box data_region;
};

/// Exact constants; only squared_ridge has them. Other kinds throw
/// UnsupportedError so the caller falls back to estimate_constants.
LossConstants analytic_constants(const LossSpec& spec, const Box& theta_region, const Box& data_region);

/// Random-probe estimates of the same constants. Suprema are maxima over
/// probes and the strong-convexity modulus is a minimum over probes.
LossConstants estimate_constants(const LossSpec& spec, const Box& theta_region, const Box& data_region,
                                 std::size_t n_probes, const SeedSpec& seed);

}  // namespace perflab
