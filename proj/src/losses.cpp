#include "perflab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace perflab {

namespace {

void check_dims(const LossSpec& spec, const Vector& z, const Theta& theta) {
  const auto m = spec.data_dim(static_cast<std::size_t>(theta.size()));
  if (static_cast<std::size_t>(z.size()) != m) {
    std::ostringstream os;
    os << to_string(spec.kind) << ": data point has dimension " << z.size() << ", expected " << m;
    throw ContractError(os.str());
  }
}

// log(1 + exp(t)) without overflow
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

std::string_view to_string(LossKind kind) {
  return kind == LossKind::squared_ridge ? "squared_ridge" : "logistic_ridge";
}

std::size_t LossSpec::data_dim(std::size_t theta_dim) const {
  return kind == LossKind::squared_ridge ? theta_dim : theta_dim + 1;
}

double loss_value(const LossSpec& spec, const Vector& z, const Theta& theta) {
  check_dims(spec, z, theta);
  const double ridge = 0.5 * spec.lambda * theta.squaredNorm();
  if (spec.kind == LossKind::squared_ridge) return (theta - z).squaredNorm() + ridge;
  const auto d = theta.size();
  const double y = z[d];
  return softplus(-y * theta.dot(z.head(d))) + ridge;
}

Vector grad_theta(const LossSpec& spec, const Vector& z, const Theta& theta) {
  check_dims(spec, z, theta);
  if (spec.kind == LossKind::squared_ridge) return 2.0 * (theta - z) + spec.lambda * theta;
  const auto d = theta.size();
  const double y = z[d];
  const double s = sigmoid(-y * theta.dot(z.head(d)));
  return -y * s * z.head(d) + spec.lambda * theta;
}

Vector grad_z(const LossSpec& spec, const Vector& z, const Theta& theta) {
  check_dims(spec, z, theta);
  if (spec.kind == LossKind::squared_ridge) return -2.0 * (theta - z);
  const auto d = theta.size();
  const double y = z[d];
  const double margin = theta.dot(z.head(d));
  const double s = sigmoid(-y * margin);
  Vector g(d + 1);
  g.head(d) = -y * s * theta;
  g[d] = -margin * s;
  return g;
}

Vector loss_values(const LossSpec& spec, const Matrix& points, const Theta& theta) {
  if (points.cols() != static_cast<Eigen::Index>(spec.data_dim(static_cast<std::size_t>(theta.size())))) {
    throw ContractError("loss_values: data dimension mismatch");
  }
  const double ridge = 0.5 * spec.lambda * theta.squaredNorm();
  if (spec.kind == LossKind::squared_ridge) {
    return ((-points).rowwise() + theta.transpose()).rowwise().squaredNorm().array() + ridge;
  }
  const auto d = theta.size();
  Vector out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double y = points(i, d);
    out[i] = softplus(-y * points.row(i).head(d).dot(theta.transpose())) + ridge;
  }
  return out;
}

Matrix grad_theta_rows(const LossSpec& spec, const Matrix& points, const Theta& theta) {
  if (points.cols() != static_cast<Eigen::Index>(spec.data_dim(static_cast<std::size_t>(theta.size())))) {
    throw ContractError("grad_theta_rows: data dimension mismatch");
  }
  const Eigen::RowVectorXd ridge = (spec.lambda * theta).transpose();
  if (spec.kind == LossKind::squared_ridge) {
    return ((2.0 * (-points)).rowwise() + (2.0 * theta).transpose()).rowwise() + ridge;
  }
  const auto d = theta.size();
  Matrix out(points.rows(), d);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double y = points(i, d);
    const double s = sigmoid(-y * points.row(i).head(d).dot(theta.transpose()));
    out.row(i) = -y * s * points.row(i).head(d) + ridge;
  }
  return out;
}

LossConstants analytic_constants(const LossSpec& spec, const Box& theta_region, const Box& data_region) {
  if (spec.kind != LossKind::squared_ridge) {
    throw UnsupportedError("analytic constants are only available for squared_ridge; use estimate_constants");
  }
  if (theta_region.dim() != data_region.dim()) {
    throw ContractError("squared_ridge: theta region and data region must have the same dimension");
  }
  LossConstants c;
  c.beta = 2.0;
  c.gamma_sc = 2.0 + spec.lambda;
  c.lip_grad = 2.0;
  // sup ||theta - z|| over two boxes is attained at opposite corners, coordinate-wise
  const Vector far = (theta_region.upper() - data_region.lower())
                         .cwiseAbs()
                         .cwiseMax((data_region.upper() - theta_region.lower()).cwiseAbs());
  c.lip_value = 2.0 * far.norm();
  c.source = ConstantSource::analytic;
  c.theta_region = theta_region;
  c.data_region = data_region;
  return c;
}

LossConstants estimate_constants(const LossSpec& spec, const Box& theta_region, const Box& data_region,
                                 std::size_t n_probes, const SeedSpec& seed) {
  if (spec.data_dim(theta_region.dim()) != data_region.dim()) {
    throw ContractError("estimate_constants: data region dimension does not match the loss");
  }
  auto rng = seed.engine();
  LossConstants c;
  c.source = ConstantSource::estimated;
  c.theta_region = theta_region;
  c.data_region = data_region;
  c.gamma_sc = std::numeric_limits<double>::infinity();

  // logistic labels live on {-1, +1}; snap the last coordinate
  auto draw_z = [&]() {
    Vector z = uniform_point(data_region, rng);
    if (spec.kind == LossKind::logistic_ridge) z[z.size() - 1] = z[z.size() - 1] >= 0 ? 1.0 : -1.0;
    return z;
  };

  for (std::size_t i = 0; i < n_probes; ++i) {
    const Theta th = uniform_point(theta_region, rng);
    const Theta th2 = uniform_point(theta_region, rng);
    const Vector z = draw_z();
    Vector z2 = z;
    // perturb features only so the pair shares a label
    const auto d = static_cast<Eigen::Index>(theta_region.dim());
    z2.head(d) = uniform_point(data_region, rng).head(d);

    const double dz = (z - z2).norm();
    if (dz > 1e-12) {
      c.beta = std::max(c.beta, (grad_theta(spec, z, th) - grad_theta(spec, z2, th)).norm() / dz);
      c.lip_grad = std::max(c.lip_grad, (grad_z(spec, z, th) - grad_z(spec, z2, th)).norm() / dz);
    }
    c.lip_value = std::max(c.lip_value, grad_z(spec, z, th).norm());
    c.lip_value = std::max(c.lip_value, grad_z(spec, z2, th2).norm());

    const double dt2 = (th2 - th).squaredNorm();
    if (dt2 > 1e-12) {
      const double gap =
          loss_value(spec, z, th2) - loss_value(spec, z, th) - grad_theta(spec, z, th).dot(th2 - th);
      c.gamma_sc = std::min(c.gamma_sc, 2.0 * gap / dt2);
    }
  }
  if (!std::isfinite(c.gamma_sc)) c.gamma_sc = 0.0;
  c.gamma_sc = std::max(c.gamma_sc, 0.0);
  return c;
}

}  // namespace perflab
