#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "perflab/transport.hpp"

using namespace perflab;

namespace {

Matrix random_cloud(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, double shift = 0.0) {
  std::normal_distribution<double> nd(shift, 1.0);
  Matrix x(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) x(i, j) = nd(rng);
  return x;
}

std::vector<std::vector<double>> rows(const Matrix& x) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(x(i, j));
  return out;
}

}  // namespace

TEST_CASE("exact W1 agrees with brute-force matching") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 1 + trial % 3;
    const Matrix a = random_cloud(rng, 7, m);
    const Matrix b = random_cloud(rng, 7, m, 0.5);
    CHECK(w1(a, b).value == doctest::Approx(oracle::brute_force_w1(rows(a), rows(b))).epsilon(1e-10));
  }
}

TEST_CASE("assignment solver returns a permutation") {
  std::mt19937_64 rng(2);
  const Matrix c = random_cloud(rng, 40, 40).cwiseAbs();
  const auto p = solve_assignment(c);
  std::vector<char> seen(40, 0);
  for (auto j : p) seen[j] = 1;
  CHECK(std::count(seen.begin(), seen.end(), 1) == 40);
}

TEST_CASE("metric axioms on random clouds") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = trial % 2 ? 2 : 1;
    const Matrix a = random_cloud(rng, 60, m);
    const Matrix b = random_cloud(rng, 60, m, 1.0);
    const Matrix c = random_cloud(rng, 60, m, -0.5);
    const double ab = w1(a, b).value, ba = w1(b, a).value;
    CHECK(ab >= 0.0);
    CHECK(w1(a, a).value == doctest::Approx(0.0).scale(1e-12));
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(w1(a, c).value <= ab + w1(b, c).value + 1e-9);
  }
}

TEST_CASE("translation by a vector moves W1 by its norm") {
  std::mt19937_64 rng(4);
  const Matrix a = random_cloud(rng, 50, 2);
  Vector v(2);
  v << 0.3, -0.4;
  const Matrix b = a.rowwise() + v.transpose();
  CHECK(std::abs(w1(a, b).value - 0.5) <= 1e-12);
  const Matrix a1 = random_cloud(rng, 300, 1);
  const Matrix b1 = a1.array() + 1.25;
  CHECK(std::abs(w1(a1, b1).value - 1.25) <= 1e-12);
}

TEST_CASE("Kantorovich-Rubinstein lower bound from 1-Lipschitz test functions") {
  std::mt19937_64 rng(5);
  const Matrix a = random_cloud(rng, 80, 2);
  const Matrix b = random_cloud(rng, 80, 2, 0.7);
  const double w = w1(a, b).value;
  std::normal_distribution<double> nd;
  for (int k = 0; k < 50; ++k) {
    Eigen::RowVectorXd anchor(2);
    anchor << nd(rng), nd(rng);
    // distance to a random point is 1-Lipschitz
    auto f = [&](const Eigen::RowVectorXd& z) { return (z - anchor).norm(); };
    double ea = 0, eb = 0;
    for (Eigen::Index i = 0; i < 80; ++i) {
      ea += f(a.row(i));
      eb += f(b.row(i));
    }
    CHECK(std::abs(ea - eb) / 80.0 <= w + 1e-12);
  }
}

TEST_CASE("unequal 1-D sizes use the CDF integral") {
  Matrix a(2, 1), b(4, 1);
  a << 0.0, 1.0;
  b << 0.0, 0.0, 1.0, 1.0;
  CHECK(w1(a, b).value == doctest::Approx(0.0).scale(1e-15));
  Matrix c(1, 1);
  c << 0.5;
  CHECK(w1(a, c).value == doctest::Approx(0.5));
  Matrix d(3, 2);
  d.setZero();
  CHECK_THROWS_AS(w1(Matrix::Zero(2, 2), d), ContractError);
}

TEST_CASE("empirical W1 of two unit normals one apart") {
  const auto inst = testing::config("gauss-mean-1d");
  double total = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto a = sample(inst.map, testing::scalar(0.0), 2000, SeedSpec{s, {0}});
    const auto b = sample(inst.map, testing::scalar(2.0), 2000, SeedSpec{s, {1}});
    total += w1(a, b).value;
  }
  CHECK(total / 20.0 == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gaussian closed form is the norm of the induced mean shift") {
  const auto inst = testing::config("gauss-mean-1d");
  CHECK(w1_gaussian(inst.map, testing::scalar(0), testing::scalar(2)).value == doctest::Approx(1.0));
  const auto two = testing::config("gauss-2d");
  Theta t(2);
  t << 1.0, -1.0;
  CHECK(w1_gaussian(two.map, t, Theta::Zero(2)).value == doctest::Approx((two.map.shift * t).norm()));
  CHECK_THROWS_AS(w1_gaussian(testing::config("strategic-logistic-2d").map, t, t), UnsupportedError);
}
