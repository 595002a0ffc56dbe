#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "perflab/bounds.hpp"

using namespace perflab;
using testing::closed;
using testing::mc;
using testing::scalar;

namespace {

double constant(const Certificate& c, const std::string& name) {
  for (const auto& nc : c.constants)
    if (nc.name == name) return nc.constant.value;
  FAIL("missing constant " << name);
  return 0.0;
}

const Certificate& find(const CertificationRun& run, CertificateName name) {
  for (const auto& c : run.certificates)
    if (c.name == name) return c;
  FAIL("missing certificate");
  return run.certificates.front();
}

}  // namespace

TEST_CASE("gap inequality vanishes on the diagonal") {
  const auto inst = testing::config("gauss-mean-1d");
  for (double t : {-2.0, 0.0, 1.3})
    CHECK(gap_inequality_residual(inst, scalar(t), scalar(t), 7.0, closed()) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gap inequality at the canonical pair") {
  const auto inst = testing::config("gauss-mean-1d");
  const oracle::Gauss1d g;
  const double L = resolve_lip_L(inst, closed()).value;
  const double expected = g.pr(2.0 / 3) - g.dpr(1.0, 2.0 / 3) + L * (0.5 * (1.0 - 2.0 / 3));
  CHECK(expected == doctest::Approx(-0.25 + L / 6));
  CHECK(gap_inequality_residual(inst, scalar(1.0), scalar(2.0 / 3), L, closed()) == doctest::Approx(expected));
  CHECK(L >= 1.5);
}

TEST_CASE("gap inequality needs L") {
  auto inst = testing::config("gauss-mean-1d");
  CHECK_THROWS_AS(gap_inequality_residual(inst, scalar(0), scalar(1), closed()), MissingConstantError);
  inst.declared.lip_L = 2.0;
  CHECK(gap_inequality_residual(inst, scalar(0), scalar(1), closed()) ==
        doctest::Approx(gap_inequality_residual(inst, scalar(0), scalar(1), 2.0, closed())));
}

TEST_CASE("gap inequality holds on random closed-form pairs") {
  for (const char* name : {"gauss-mean-1d", "gauss-2d"}) {
    const auto inst = testing::config(name);
    const double L = resolve_lip_L(inst, closed()).value;
    std::mt19937_64 rng(11);
    double worst = 1e300;
    for (int i = 0; i < 200; ++i) {
      const Theta t = uniform_point(inst.domain, rng);
      const Theta tp = uniform_point(inst.domain, rng);
      worst = std::min(worst, gap_inequality_residual(inst, t, tp, L, closed()));
    }
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("gap inequality holds on coupled Monte Carlo batches") {
  const auto inst = testing::config("gauss-mean-1d");
  const double L = resolve_lip_L(inst, closed()).value;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Theta t = uniform_point(inst.domain, rng);
    const Theta tp = uniform_point(inst.domain, rng);
    CHECK(gap_inequality_residual(inst, t, tp, L, mc(2000, i)) >= -1e-9);
  }
}

TEST_CASE("certificates require a stable point") {
  const auto inst = testing::config("gauss-mean-1d");
  CHECK_THROWS_AS(prop1_certificate(inst, scalar(0.0), closed()), ContractError);
  CHECK_THROWS_AS(example1_bound(inst, scalar(2.0), closed()), ContractError);
  CHECK_THROWS_AS(example3_bound(inst, scalar(-1.0), closed()), ContractError);
}

TEST_CASE("canonical instance: no optimality claim, example bounds hold") {
  const auto inst = testing::config("gauss-mean-1d");
  const auto run = certify_all(inst, closed());
  REQUIRE(run.certificates.size() == 4);
  CHECK(run.stable.theta_star[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(run.truth.theta_po[0] == doctest::Approx(2.0 / 3).epsilon(1e-3));

  const auto& p1 = find(run, CertificateName::PROP1_OPTIMALITY);
  CHECK_FALSE(p1.holds);
  CHECK(p1.status == CertificateStatus::fails);
  CHECK(p1.n_failing > 0);
  REQUIRE_FALSE(p1.failing_probes.empty());
  CHECK(p1.failing_probes.front().residual < 0.0);
  CHECK(p1.actual_value == doctest::Approx(1.75));
  CHECK(p1.bound_value == doctest::Approx(5.0 / 3).epsilon(1e-6));

  const auto& e1 = find(run, CertificateName::EX1_SUBOPT_LB);
  const double L = constant(e1, "L");
  CHECK(constant(e1, "B") == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(e1.actual_value == doctest::Approx(1.0 / 12).epsilon(1e-5));
  CHECK(e1.bound_value == doctest::Approx(3.0 * L));
  CHECK(e1.holds);

  const auto& e2 = find(run, CertificateName::EX2_DIST_SQRT);
  CHECK(constant(e2, "gamma_qg") == doctest::Approx(1.5).epsilon(0.05));
  CHECK(e2.actual_value == doctest::Approx(1.0 / 3).epsilon(1e-2));
  CHECK(e2.bound_value == doctest::Approx(std::sqrt(L * 3.0 / constant(e2, "gamma_qg"))));
  CHECK(e2.holds);

  const auto& e3 = find(run, CertificateName::EX3_DIST_LIN);
  CHECK(constant(e3, "eps") == doctest::Approx(0.5));
  CHECK(e3.bound_value == doctest::Approx(L * 0.5 / constant(e3, "gamma_qg")));
  CHECK(e3.holds);
}

TEST_CASE("static map: every certificate holds trivially") {
  const auto run = certify_all(testing::config("gauss-static-1d"), closed());
  for (const auto& c : run.certificates) CHECK(c.holds);
  const auto& p1 = find(run, CertificateName::PROP1_OPTIMALITY);
  CHECK(p1.n_failing == 0);
  CHECK(p1.actual_value <= p1.bound_value + p1.tolerance);
  CHECK(find(run, CertificateName::EX1_SUBOPT_LB).bound_value == 0.0);
  CHECK(find(run, CertificateName::EX3_DIST_LIN).bound_value == 0.0);
  CHECK(find(run, CertificateName::EX3_DIST_LIN).actual_value <= 1e-3);
}

TEST_CASE("coinciding instance is consistent with the oracle") {
  const auto inst = testing::gauss1d(0.25, 0.0);
  const auto run = certify_all(inst, closed());
  CHECK(run.stable.theta_star[0] == doctest::Approx(4.0 / 3).epsilon(1e-6));
  const auto& p1 = find(run, CertificateName::PROP1_OPTIMALITY);
  CHECK(p1.actual_value <= p1.bound_value + 1e-6);
  if (p1.holds) CHECK(p1.n_failing == 0);
  for (std::size_t i = 1; i < 4; ++i) CHECK(run.certificates[i].holds);
  CHECK(find(run, CertificateName::EX3_DIST_LIN).actual_value <= 1e-3);
}

TEST_CASE("missing quadratic growth makes distance certificates inconclusive") {
  auto inst = testing::config("gauss-mean-1d");
  inst.declared.gamma_qg = 0.0;
  const auto c = example2_bound(inst, scalar(1.0), closed());
  CHECK(c.status == CertificateStatus::inconclusive);
  CHECK_FALSE(c.holds);
}

TEST_CASE("certificates are monotone in their constants") {
  const auto base_inst = testing::config("gauss-mean-1d");
  const auto run = certify_all(base_inst, closed());
  const auto truth = run.truth;
  const Theta ps = run.stable.theta_star;
  const double L = constant(run.certificates[1], "L");
  const double gamma = constant(run.certificates[2], "gamma_qg");
  for (double scale : {1.0, 1.5, 4.0}) {
    auto inst = base_inst;
    inst.declared.lip_L = L * scale;
    inst.declared.shift_bound_B = 3.0 * scale;
    inst.declared.eps = 0.5 * scale;
    inst.declared.gamma_qg = gamma / scale;
    CHECK(example1_bound(inst, ps, closed(), {}, truth).holds);
    CHECK(example2_bound(inst, ps, closed(), {}, truth).holds);
    CHECK(example3_bound(inst, ps, closed(), {}, truth).holds);
  }
  // a tight declared L can flip the bound, a larger one never flips it back
  auto tight = base_inst;
  bool held = false;
  for (double Ld : {0.001, 0.01, 0.1, 1.0, 10.0}) {
    tight.declared.lip_L = Ld;
    const bool h = example1_bound(tight, ps, closed(), {}, truth).holds;
    CHECK((h || !held));
    held = held || h;
  }
  CHECK(held);
}

TEST_CASE("random instances: example bounds hold against the grid oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0.0, 0.8), ul(0.0, 2.0), um(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double a = ua(rng), lambda = ul(rng), mu0 = um(rng);
    CAPTURE(a);
    CAPTURE(lambda);
    CAPTURE(mu0);
    const auto inst = testing::gauss1d(a, lambda, mu0);
    const auto run = certify_all(inst, closed());
    const oracle::Gauss1d g{mu0, a, lambda, 1.0};
    CHECK(run.stable.theta_star[0] == doctest::Approx(std::clamp(g.stable_point(), -3.0, 3.0)).epsilon(1e-4));
    const auto ref = oracle::grid_argmin([&](double t) { return g.pr(t); }, -3.0, 3.0, 0.005);
    CHECK(std::abs(run.truth.theta_po[0] - ref.x) <= 0.006);
    for (std::size_t k = 1; k < 4; ++k) CHECK(run.certificates[k].holds);
    const auto& p1 = run.certificates[0];
    if (ref.value < p1.actual_value - 1e-6) CHECK_FALSE(p1.holds);
  }
}

TEST_CASE("Monte Carlo certification agrees with closed form") {
  const auto inst = testing::config("gauss-mean-1d");
  BoundsOptions b;
  b.grid_step = 0.01;
  b.stable_tol = 1e-3;
  const auto run = certify_all(inst, mc(4000, 9), b);
  CHECK(run.stable.theta_star[0] == doctest::Approx(1.0).epsilon(0.1));
  CHECK_FALSE(run.certificates[0].holds);
  for (std::size_t k = 1; k < 4; ++k) CHECK(run.certificates[k].holds);
}

TEST_CASE("shift-gradient ratio probe only measures") {
  const auto inst = testing::config("gauss-mean-1d");
  const auto r = shift_gradient_ratio(inst, scalar(1.0), closed());
  CHECK(r.n_probes + r.n_skipped == 201);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio >= r.median_ratio);
  CHECK(r.median_ratio > 0.0);
}
