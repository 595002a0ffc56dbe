#include <doctest.h>

#include "helpers.hpp"
#include "perflab/distmaps.hpp"

using namespace perflab;
using testing::scalar;

TEST_CASE("gaussian samples have the induced mean and variance") {
  const auto inst = testing::config("gauss-mean-1d");
  const auto batch = sample(inst.map, scalar(2.0), 200000, SeedSpec{1, {}});
  const Vector x = batch.points.col(0);
  const double mean = x.mean();
  const double var = (x.array() - mean).square().mean();
  CHECK(mean == doctest::Approx(2.0).epsilon(0.01));  // 1 + 0.5 * 2
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  CHECK(batch.theta_used[0] == 2.0);
}

TEST_CASE("same seed at two thetas gives translated batches") {
  const auto inst = testing::config("gauss-2d");
  Theta t1(2), t2(2);
  t1 << 0.3, -1.0;
  t2 << -1.5, 0.7;
  const auto b1 = sample(inst.map, t1, 500, SeedSpec{9, {4}});
  const auto b2 = sample(inst.map, t2, 500, SeedSpec{9, {4}});
  const Vector shift = inst.map.shift * (t1 - t2);
  for (Eigen::Index i = 0; i < 500; ++i) {
    CHECK((b1.points.row(i) - b2.points.row(i) - shift.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("sampling is reproducible and seed dependent") {
  const auto inst = testing::config("strategic-logistic-2d");
  const Theta t = Theta::Constant(2, 0.5);
  const auto a = sample(inst.map, t, 100, SeedSpec{3, {}});
  const auto b = sample(inst.map, t, 100, SeedSpec{3, {}});
  const auto c = sample(inst.map, t, 100, SeedSpec{4, {}});
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
}

TEST_CASE("strategic agents move against theta and keep their labels") {
  const auto inst = testing::config("strategic-logistic-2d");
  Theta t(2);
  t << 1.0, -2.0;
  const auto base = sample(inst.map, Theta::Zero(2), 1000, SeedSpec{6, {}});
  const auto moved = sample(inst.map, t, 1000, SeedSpec{6, {}});
  REQUIRE(moved.points.cols() == 3);
  for (Eigen::Index i = 0; i < 1000; ++i) {
    CHECK(moved.points(i, 2) == base.points(i, 2));
    CHECK(std::abs(moved.points(i, 2)) == 1.0);
    CHECK(moved.points(i, 0) == doctest::Approx(base.points(i, 0) - 1.0 / 4.0));
    CHECK(moved.points(i, 1) == doctest::Approx(base.points(i, 1) + 2.0 / 4.0));
  }
}

TEST_CASE("strategic labels follow the logistic base model") {
  const auto inst = testing::config("strategic-logistic-2d");
  const auto batch = sample(inst.map, Theta::Zero(2), 100000, SeedSpec{2, {}});
  // P(y = 1) = E sigmoid(2 x1 - x2) = 1/2 by symmetry; corr(y, x1) > 0
  const Vector y = batch.points.col(2);
  CHECK(y.mean() == doctest::Approx(0.0).epsilon(0.02).scale(1.0));
  CHECK((y.array() * batch.points.col(0).array()).mean() > 0.3);
}

TEST_CASE("score has mean zero and matches a finite difference of the log density") {
  const auto inst = testing::config("gauss-2d");
  Theta t(2);
  t << 0.2, -0.4;
  const auto batch = sample(inst.map, t, 100000, SeedSpec{8, {}});
  Vector mean = Vector::Zero(2);
  for (std::size_t i = 0; i < batch.size(); ++i) mean += score(inst.map, batch.point(i), t);
  mean /= static_cast<double>(batch.size());
  CHECK(mean.norm() < 0.02);

  auto log_density = [&](const Vector& z, const Theta& th) {
    const auto mc = closed_form_mean_cov(inst.map, th);
    return -0.5 * ((z - mc.mean).array().square() / mc.variance.array()).sum();
  };
  Vector z(2);
  z << 0.7, 1.1;
  const Vector s = score(inst.map, z, t);
  for (Eigen::Index j = 0; j < 2; ++j) {
    Theta up = t, dn = t;
    up[j] += 1e-6;
    dn[j] -= 1e-6;
    CHECK(s[j] == doctest::Approx((log_density(z, up) - log_density(z, dn)) / 2e-6).epsilon(1e-6));
  }
  CHECK_THROWS_AS(score(testing::config("strategic-logistic-2d").map, Vector::Zero(3), Theta::Zero(2)),
                  UnsupportedError);
}

TEST_CASE("translation norm is the operator norm of the response") {
  CHECK(translation_norm(testing::config("gauss-mean-1d").map, 1) == doctest::Approx(0.5));
  CHECK(translation_norm(testing::config("strategic-logistic-2d").map, 2) == doctest::Approx(0.25));
  const auto inst = testing::config("gauss-2d");
  Eigen::JacobiSVD<Matrix> svd(inst.map.shift);
  CHECK(translation_norm(inst.map, 2) == doctest::Approx(svd.singularValues()[0]));
}

TEST_CASE("quantile region covers the induced laws") {
  const auto inst = testing::config("gauss-mean-1d");
  const Box closed = quantile_region(inst.map, inst.domain, 0.999, testing::closed());
  // mean ranges over [-0.5, 2.5]; the 99.95% normal quantile is about 3.29
  CHECK(closed.lower()[0] == doctest::Approx(-0.5 - 3.2905).epsilon(1e-3));
  CHECK(closed.upper()[0] == doctest::Approx(2.5 + 3.2905).epsilon(1e-3));
  const Box sampled = quantile_region(inst.map, inst.domain, 0.999, testing::mc(20000, 1));
  CHECK(std::abs(sampled.lower()[0] - closed.lower()[0]) < 0.3);
  CHECK(std::abs(sampled.upper()[0] - closed.upper()[0]) < 0.3);
}
