#include "perflab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace perflab {

namespace {

double w1_sorted_1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() == b.size()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
  }
  // integral of |F_a - F_b| over the merged breakpoints
  const double wa = 1.0 / static_cast<double>(a.size());
  const double wb = 1.0 / static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double prev = std::min(a.front(), b.front());
  double total = 0.0;
  while (i < a.size() || j < b.size()) {
    const double next = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    total += std::abs(fa - fb) * (next - prev);
    while (i < a.size() && a[i] == next) {
      fa += wa;
      ++i;
    }
    while (j < b.size() && b[j] == next) {
      fb += wb;
      ++j;
    }
    prev = next;
  }
  return total;
}

}  // namespace

std::string_view to_string(W1Method method) {
  switch (method) {
    case W1Method::quantile_1d: return "quantile_1d";
    case W1Method::assignment: return "assignment";
    case W1Method::gaussian_closed_form: return "gaussian_closed_form";
  }
  return "unknown";
}

std::vector<std::size_t> solve_assignment(const Matrix& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw ContractError("solve_assignment: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials u (rows), v (cols); match[j] = row assigned to column j
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0);
  std::vector<std::size_t> way(n + 1, 0);
  std::vector<double> minv(n + 1);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

W1Estimate w1(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ContractError("w1: batches have different data dimensions");
  if (a.rows() == 0 || b.rows() == 0) throw ContractError("w1: empty batch");
  if (a.cols() == 1) {
    std::vector<double> xa(a.data(), a.data() + a.rows());
    std::vector<double> xb(b.data(), b.data() + b.rows());
    const auto n = static_cast<std::size_t>(std::max(a.rows(), b.rows()));
    return {w1_sorted_1d(std::move(xa), std::move(xb)), W1Method::quantile_1d, n};
  }
  if (a.rows() != b.rows()) {
    std::ostringstream os;
    os << "w1: assignment route needs equal batch sizes (" << a.rows() << " vs " << b.rows() << ")";
    throw ContractError(os.str());
  }
  const auto n = static_cast<std::size_t>(a.rows());
  if (n > kMaxAssignmentSize) throw ContractError("w1: assignment route is limited to 4096 points per batch");
  Matrix cost(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) cost(i, j) = (a.row(i) - b.row(j)).norm();
  }
  const auto match = solve_assignment(cost);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(match[i]));
  return {total / static_cast<double>(n), W1Method::assignment, n};
}

W1Estimate w1(const SampleBatch& a, const SampleBatch& b) { return w1(a.points, b.points); }

W1Estimate w1_gaussian(const DistMapSpec& map, const Theta& theta1, const Theta& theta2) {
  if (map.kind != MapKind::gaussian_location_scale) {
    throw UnsupportedError("w1_gaussian needs a gaussian_location_scale map; use w1 on sampled batches instead");
  }
  require_same_dim(theta1, theta2, "w1_gaussian");
  if (theta1.size() != map.shift.cols()) throw ContractError("w1_gaussian: theta dimension mismatch");
  return {(map.shift * (theta1 - theta2)).norm(), W1Method::gaussian_closed_form, 0};
}

}  // namespace perflab
