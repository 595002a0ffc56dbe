#include "perflab/distmaps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

namespace perflab {

namespace {

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

void require_gaussian(const DistMapSpec& map, std::string_view op) {
  if (map.kind != MapKind::gaussian_location_scale) {
    throw UnsupportedError(std::string(op) + " requires a gaussian_location_scale map; " +
                           std::string(to_string(map.kind)) + " has no tractable density");
  }
}

// The shift matrix as an m x d operator for either kind.
Matrix response_matrix(const DistMapSpec& map, std::size_t theta_dim) {
  if (map.kind == MapKind::gaussian_location_scale) return map.shift;
  const auto d = static_cast<Eigen::Index>(theta_dim);
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(map.data_dim()), d);
  a.topRows(d) = -Matrix::Identity(d, d) / map.cost;
  return a;
}

}  // namespace

std::string_view to_string(MapKind kind) {
  return kind == MapKind::gaussian_location_scale ? "gaussian_location_scale" : "strategic_response";
}

std::size_t DistMapSpec::data_dim() const {
  const auto m = static_cast<std::size_t>(base_mean.size());
  return has_labels() ? m + 1 : m;
}

void DistMapSpec::validate(std::size_t theta_dim) const {
  const auto d = static_cast<Eigen::Index>(theta_dim);
  if (base_mean.size() == 0) throw ContractError("map.base_mean must be nonempty");
  if (sigma.size() != base_mean.size()) throw ContractError("map.sigma must have the same length as map.base_mean");
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i])) throw ContractError("map.sigma must be positive and finite");
  }
  if (!base_mean.allFinite()) throw ContractError("map.base_mean must be finite");
  if (kind == MapKind::gaussian_location_scale) {
    if (shift.rows() != base_mean.size() || shift.cols() != d) {
      std::ostringstream os;
      os << "map.shift must be " << base_mean.size() << " x " << d << ", got " << shift.rows() << " x " << shift.cols();
      throw ContractError(os.str());
    }
    if (!shift.allFinite()) throw ContractError("map.shift must be finite");
  } else {
    if (base_mean.size() != d) throw ContractError("map.base_mean must have the parameter dimension for strategic_response");
    if (!(cost > 0.0) || !std::isfinite(cost)) throw ContractError("map.cost must be positive and finite");
    if (label_weights.size() != 0 && label_weights.size() != d) {
      throw ContractError("map.label_weights must be empty or have the parameter dimension");
    }
  }
}

bool DistMapSpec::operator==(const DistMapSpec& other) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
  };
  return kind == other.kind && same(base_mean, other.base_mean) && same(shift, other.shift) &&
         same(sigma, other.sigma) && cost == other.cost && same(label_weights, other.label_weights);
}

SampleBatch sample(const DistMapSpec& map, const Theta& theta, std::size_t n, const SeedSpec& seed) {
  if (n == 0) throw ContractError("sample: n must be >= 1");
  auto rng = seed.engine();
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto base_dim = map.base_mean.size();
  const auto rows = static_cast<Eigen::Index>(n);

  SampleBatch batch;
  batch.theta_used = theta;
  batch.seed = seed;
  batch.points.resize(rows, static_cast<Eigen::Index>(map.data_dim()));

  // base noise first, row-major, so the draw order never depends on theta
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < base_dim; ++j) {
      batch.points(i, j) = map.base_mean[j] + map.sigma[j] * normal(rng);
    }
  }

  if (map.kind == MapKind::gaussian_location_scale) {
    if (theta.size() != map.shift.cols()) throw ContractError("sample: theta dimension does not match map.shift");
    const Vector offset = map.shift * theta;
    batch.points.rowwise() += offset.transpose();
    return batch;
  }

  if (theta.size() != base_dim) throw ContractError("sample: theta dimension does not match the strategic map");
  if (map.has_labels()) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double p = sigmoid(batch.points.row(i).head(base_dim).dot(map.label_weights.transpose()));
      batch.points(i, base_dim) = unit(rng) < p ? 1.0 : -1.0;
    }
  }
  batch.points.leftCols(base_dim).rowwise() -= (theta / map.cost).transpose();
  return batch;
}

Vector score(const DistMapSpec& map, const Vector& z, const Theta& theta) {
  require_gaussian(map, "score");
  require_same_dim(z, map.base_mean, "score");
  const Vector mean = map.base_mean + map.shift * theta;
  return map.shift.transpose() * (z - mean).cwiseQuotient(map.sigma.cwiseAbs2());
}

MeanCov closed_form_mean_cov(const DistMapSpec& map, const Theta& theta) {
  require_gaussian(map, "closed_form_mean_cov");
  if (theta.size() != map.shift.cols()) throw ContractError("closed_form_mean_cov: theta dimension mismatch");
  return {map.base_mean + map.shift * theta, map.sigma.cwiseAbs2()};
}

double translation_norm(const DistMapSpec& map, std::size_t theta_dim) {
  const Matrix a = response_matrix(map, theta_dim);
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

Box quantile_region(const DistMapSpec& map, const Box& theta_box, double coverage, const EvalOptions& opts) {
  if (!(coverage > 0.0 && coverage < 1.0)) throw ContractError("quantile_region: coverage must lie in (0, 1)");
  const double tail = 0.5 * (1.0 - coverage);
  const auto m = static_cast<Eigen::Index>(map.data_dim());
  const auto d = theta_box.dim();

  if (opts.mode == EvalMode::closed_form) {
    require_gaussian(map, "closed-form quantile_region");
    const double zq = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - tail);
    Vector lo = map.base_mean;
    Vector hi = map.base_mean;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(d); ++j) {
        const double a = map.shift(i, j) * theta_box.lower()[j];
        const double b = map.shift(i, j) * theta_box.upper()[j];
        lo[i] += std::min(a, b);
        hi[i] += std::max(a, b);
      }
      lo[i] -= zq * map.sigma[i];
      hi[i] += zq * map.sigma[i];
    }
    return {lo, hi};
  }

  // corners (capped) plus centre
  std::vector<Theta> anchors{theta_box.center()};
  const std::size_t corners = d <= 10 ? (std::size_t{1} << d) : 0;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    Theta c = theta_box.lower();
    for (std::size_t j = 0; j < d; ++j) {
      if (mask & (std::size_t{1} << j)) c[static_cast<Eigen::Index>(j)] = theta_box.upper()[static_cast<Eigen::Index>(j)];
    }
    anchors.push_back(c);
  }
  Vector lo = Vector::Constant(m, std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(m, -std::numeric_limits<double>::infinity());
  std::vector<double> column;
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const auto batch = sample(map, anchors[k], opts.n, opts.seed.child(k));
    for (Eigen::Index j = 0; j < m; ++j) {
      column.assign(batch.points.col(j).data(), batch.points.col(j).data() + batch.points.rows());
      std::sort(column.begin(), column.end());
      const auto last = static_cast<double>(column.size() - 1);
      const auto lo_idx = static_cast<std::size_t>(std::floor(tail * last));
      const auto hi_idx = static_cast<std::size_t>(std::ceil((1.0 - tail) * last));
      lo[j] = std::min(lo[j], column[lo_idx]);
      hi[j] = std::max(hi[j], column[hi_idx]);
    }
  }
  return {lo, hi};
}

}  // namespace perflab
