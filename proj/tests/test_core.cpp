#include <doctest.h>

#include <random>

#include "perflab/core.hpp"

using namespace perflab;

TEST_CASE("box rejects inverted or mismatched bounds") {
  CHECK_THROWS_AS(Box(Vector::Constant(1, 1.0), Vector::Constant(1, -1.0)), ContractError);
  CHECK_THROWS_AS(Box(Vector::Zero(2), Vector::Ones(3)), ContractError);
  const Box b(Vector::Constant(2, -1.0), Vector::Constant(2, 2.0));
  CHECK(b.dim() == 2);
  CHECK(b.contains(Vector::Zero(2)));
  CHECK_FALSE(b.contains(Vector::Constant(2, 3.0)));
  CHECK(b.center().isApprox(Vector::Constant(2, 0.5)));
}

TEST_CASE("projection clamps per coordinate and checks dimension") {
  const Box b(Vector::Constant(1, -3.0), Vector::Constant(1, 3.0));
  CHECK(project(Vector::Constant(1, 5.0), b)[0] == 3.0);
  CHECK(project(Vector::Constant(1, -7.0), b)[0] == -3.0);
  CHECK(project(Vector::Constant(1, 0.25), b)[0] == 0.25);
  CHECK_THROWS_AS(project(Vector::Zero(2), b), ContractError);
}

TEST_CASE("projection is idempotent and nonexpansive on random points") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 4.0);
  const Box b(Vector::Constant(3, -1.0), Vector::Constant(3, 2.0));
  for (int i = 0; i < 1000; ++i) {
    Vector x(3), y(3);
    for (int k = 0; k < 3; ++k) {
      x[k] = nd(rng);
      y[k] = nd(rng);
    }
    const Vector px = project(x, b);
    CHECK(b.contains(px));
    CHECK((project(px, b) - px).norm() == 0.0);
    CHECK((px - project(y, b)).norm() <= (x - y).norm() + 1e-12);
  }
}

TEST_CASE("uniform points fall inside the box") {
  std::mt19937_64 rng(3);
  const Box b(Vector::Constant(2, -0.5), Vector::Constant(2, 0.5));
  for (int i = 0; i < 200; ++i) CHECK(b.contains(uniform_point(b, rng)));
}

TEST_CASE("linspace includes both endpoints") {
  const auto xs = linspace(-3.0, 3.0, 201);
  REQUIRE(xs.size() == 201);
  CHECK(xs.front() == -3.0);
  CHECK(xs.back() == 3.0);
  CHECK(xs[100] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("seed streams are pure functions of root and path") {
  const SeedSpec s{42, {}};
  auto e1 = s.child(3).engine();
  auto e2 = s.child(3).engine();
  CHECK(e1() == e2());
  CHECK(s.child(3).stream_key() != s.child(4).stream_key());
  CHECK(s.child(1).child(2).stream_key() != s.child(2).child(1).stream_key());
  CHECK(SeedSpec{1, {}}.stream_key() != SeedSpec{2, {}}.stream_key());
}

TEST_CASE("constant sets reject negative entries") {
  ConstantSet c;
  CHECK(c.empty());
  c.eps = 0.5;
  CHECK_FALSE(c.empty());
  CHECK_NOTHROW(c.validate());
  c.beta = -1.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
}
