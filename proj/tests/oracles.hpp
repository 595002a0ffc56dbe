#pragma once
// Reference computations that share no code with the library: plain numerical
// quadrature, brute-force matching and exhaustive grid search.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// E f(Z) for Z ~ N(mean, sd^2), composite Simpson over mean +- 12 sd.
inline double gauss_expect(const std::function<double(double)>& f, double mean, double sd, int intervals = 4000) {
  if (sd == 0.0) return f(mean);
  const double lo = mean - 12.0 * sd;
  const double hi = mean + 12.0 * sd;
  const double h = (hi - lo) / intervals;
  auto w = [&](double z) {
    const double u = (z - mean) / sd;
    return f(z) * std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * kPi));
  };
  double s = w(lo) + w(hi);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * w(lo + i * h);
  return s * h / 3.0;
}

// One-dimensional Gaussian location instance: z ~ N(mu0 + a t1, sigma^2),
// loss (t2 - z)^2 + lambda/2 t2^2.
struct Gauss1d {
  double mu0 = 1.0;
  double a = 0.5;
  double lambda = 1.0;
  double sigma = 1.0;

  [[nodiscard]] double dpr(double t1, double t2) const {
    return gauss_expect([&](double z) { return (t2 - z) * (t2 - z) + 0.5 * lambda * t2 * t2; }, mu0 + a * t1, sigma);
  }
  [[nodiscard]] double pr(double t) const { return dpr(t, t); }
  // d/dt1 of DPR by the score identity, integrated numerically.
  [[nodiscard]] double grad2(double t) const {
    const double m = mu0 + a * t;
    return gauss_expect(
        [&](double z) { return ((t - z) * (t - z) + 0.5 * lambda * t * t) * a * (z - m) / (sigma * sigma); }, m, sigma);
  }
  [[nodiscard]] double grad1(double t) const {
    return gauss_expect([&](double z) { return 2.0 * (t - z) + lambda * t; }, mu0 + a * t, sigma);
  }
  // Minimiser of s -> dpr(t1, s): the objective is a parabola in s, so three
  // quadrature values pin down its vertex.
  [[nodiscard]] double retrain(double t1) const {
    const double fm = dpr(t1, -1.0);
    const double f0 = dpr(t1, 0.0);
    const double fp = dpr(t1, 1.0);
    return 0.5 * (fm - fp) / (fm - 2.0 * f0 + fp);
  }
  // Fixed point of retrain, by bisection on retrain(t) - t.
  [[nodiscard]] double stable_point() const {
    double lo = -100.0;
    double hi = 100.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((retrain(mid) - mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

// Exhaustive W1 between two equal-size 1-D or multi-D point clouds (rows).
inline double brute_force_w1(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < a[i].size(); ++k) d2 += (a[i][k] - b[perm[i]][k]) * (a[i][k] - b[perm[i]][k]);
      total += std::sqrt(d2);
    }
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

struct GridMin {
  double x = 0.0;
  double value = 0.0;
};

// Exhaustive minimum of f over lo, lo + h, ..., hi.
inline GridMin grid_argmin(const std::function<double(double)>& f, double lo, double hi, double h) {
  GridMin best{lo, f(lo)};
  const auto steps = static_cast<long>(std::floor((hi - lo) / h + 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double x = lo + static_cast<double>(k) * h;
    const double v = f(x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

}  // namespace oracle
