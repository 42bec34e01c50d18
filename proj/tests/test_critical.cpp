#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdirac/critical.hpp"
#include "test_util.hpp"

using namespace pdirac;
using namespace pdirac::testutil;

namespace {

Energy superlinear_energy(DiracPtr dirac, double p = 2.0, double e = 4.0) {
  return Energy(std::move(dirac), p, Nonlinearity::power(1.0, e));
}

}  // namespace

TEST_CASE("rim estimates") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));

  SUBCASE("pure kinetic term is exact on the sphere") {
    for (double p : {1.5, 2.0}) {
      Energy energy(dirac, p, Nonlinearity::zero());
      const double r = 0.37;
      CHECK(rim_estimate(energy, r, 8, 0) ==
            doctest::Approx(std::pow(r, p) / p).epsilon(1e-12));
    }
  }

  SUBCASE("small sphere keeps a positive rim under the quartic term") {
    Energy energy = superlinear_energy(dirac);
    CHECK(rim_estimate(energy, 1e-2, 32, 0) > 0.0);
  }

  SUBCASE("degenerate radius") {
    Energy energy = superlinear_energy(dirac);
    CHECK(rim_estimate(energy, 0.0, 8, 0) == 0.0);
  }
}

TEST_CASE("ray endpoint search") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));
  Energy energy = superlinear_energy(dirac);
  SpinorField u = constant_spinor(dirac->model_ptr(), dirac->spinor_dim(), 1.0);

  SpinorField e1 = find_e(energy, u, 1e-2);
  CHECK(energy.value(e1) <= 0.0);
  CHECK(dirac->sobolev_norm(e1, 2.0) > 1e-2);

  SpinorField e2 = find_e(energy, u, 1e-2);
  CHECK(e1.values == e2.values);

  Energy kinetic(dirac, 2.0, Nonlinearity::zero());
  CHECK_THROWS_AS(find_e(kinetic, u, 1e-2), std::invalid_argument);
}

TEST_CASE("constant branch family stays put across exponents") {
  struct Case {
    int m;
    std::vector<double> twist;
    double p, e;
  };
  for (const Case& c : {Case{3, {0.5, 0.0, 0.0}, 2.0, 4.0},
                        Case{3, {0.5, 0.5, 0.5}, 2.0, 1.5},
                        Case{2, {0.5, 0.0}, 1.5, 2.5},
                        Case{3, {0.5, 0.0, 0.0}, 2.5, 4.0}}) {
    auto dirac = make_dirac(torus(c.m, 8, c.twist));
    Energy energy(dirac, c.p, Nonlinearity::power(1.0, c.e), -1.0, true);
    CriticalPoint branch = constant_branch_point(energy);
    CAPTURE(c.p);
    CAPTURE(c.e);
    CHECK(branch.grad_residual < 1e-8);
    CHECK(branch.nehari < 1e-8);
  }
}

TEST_CASE("mountain pass seeded on the constant ray reproduces the branch") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));
  Energy energy = superlinear_energy(dirac);
  SolveConfig cfg;
  cfg.max_iter = 4000;
  CriticalPoint point = mountain_pass(energy, cfg, constant_branch(energy));
  REQUIRE(point.accepted);
  const double expected = std::pow(kPi, 4.0) / 4.0;
  CHECK(std::abs(point.value - expected) / expected < 1e-6);
  CHECK(point.grad_residual < cfg.tol);
  CHECK(point.nehari < 1e-6);
  CHECK(point.value >= rim_estimate(energy, cfg.rim_radius, cfg.rim_samples, cfg.seed) - 1e-10);

  PsReport rep = ps_diagnostic(energy, point.trace);
  CHECK(rep.bounded);
  CHECK(rep.final_residual <= cfg.tol);
}

TEST_CASE("mountain pass from a random direction") {
  auto dirac = make_dirac(torus(3, 4, {0.5, 0.0, 0.0}));
  Energy energy = superlinear_energy(dirac);
  SolveConfig cfg;
  cfg.seed = 1;
  cfg.max_iter = 12000;
  CriticalPoint point = mountain_pass(energy, cfg);
  REQUIRE(point.accepted);
  CHECK(point.value > 0.0);
  CHECK(point.grad_residual < cfg.tol);
  CHECK(point.nehari < 1e-6);
  CHECK(weak_solution_check(energy, point.field, 50, 9) <= 10.0 * cfg.tol);

  SUBCASE("negated point passes identically") {
    CHECK(energy.value(-point.field) == point.value);
    CHECK(energy.residual_norm(-point.field) ==
          doctest::Approx(point.grad_residual).epsilon(1e-12));
  }
}

TEST_CASE("mountain pass rejects a misclassified term") {
  auto dirac = make_dirac(torus(3, 4, {0.5, 0.0, 0.0}));
  Energy sub(dirac, 2.0, Nonlinearity::power(1.0, 1.5));
  SolveConfig cfg;
  CHECK_THROWS_AS(mountain_pass(sub, cfg), std::invalid_argument);
}

TEST_CASE("global minimization in the sublinear regime") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));
  SolveConfig cfg;
  cfg.max_iter = 20000;

  SUBCASE("power term: below the constant-branch level") {
    Energy energy(dirac, 2.0, Nonlinearity::power(1.0, 1.5));
    CriticalPoint point = global_minimize(energy, cfg);
    REQUIRE(point.accepted);
    const double branch_value = std::pow(kPi, -6.0) * (0.5 - 2.0 / 3.0);
    CHECK(point.value < 0.0);
    CHECK(point.value <= branch_value + 1e-8);
    CHECK(point.grad_residual < cfg.tol);
    CHECK(point.nehari < 1e-6);
  }

  SUBCASE("kinetic term alone: the trivial minimizer") {
    Energy energy(dirac, 2.0, Nonlinearity::zero());
    CriticalPoint point = global_minimize(energy, cfg);
    REQUIRE(point.accepted);
    CHECK(std::abs(point.value) < 1e-10);
    CHECK(l2_norm(point.field) < 1e-4);
    CHECK(ps_diagnostic(energy, point.trace).bounded);
  }
}

TEST_CASE("symmetric sweep on nested subspaces") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));
  Energy energy = superlinear_energy(dirac);
  SolveConfig cfg;
  cfg.max_iter = 8000;

  auto points = fountain_sequence(energy, cfg, 4);
  REQUIRE(points.size() == 4);
  for (const CriticalPoint& pt : points) {
    CHECK(pt.accepted);
    CHECK(pt.value > 0.0);
    CHECK(pt.grad_residual < 1e-5);
    CHECK(energy.value(-pt.field) == pt.value);
  }
  TrendReport trend = fountain_trend(points);
  CHECK(trend.ok);

  SUBCASE("level one agrees with the restricted pass run under the same seed") {
    std::vector<SpinorField> span{dirac->eigenfield(0), dirac->eigenfield(1)};
    CriticalPoint direct = mountain_pass(energy, cfg, {}, &span);
    CHECK(std::abs(direct.value - points[0].value) < 1e-8);
  }

  SUBCASE("restricted points solve the restricted weak problem") {
    std::vector<SpinorField> span;
    for (std::size_t i = 0; i < 2; ++i) span.push_back(dirac->eigenfield(i));
    CHECK(weak_solution_check(energy, points[0].field, 50, 17, &span) <= 10.0 * cfg.tol);
  }
}

TEST_CASE("negative companion sweep") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));
  Energy energy(dirac, 2.0, Nonlinearity::power(1.0, 1.5));
  SolveConfig cfg;
  cfg.max_iter = 6000;

  auto points = dual_fountain_sequence(energy, cfg, 4);
  REQUIRE(points.size() == 4);
  const double branch_value = std::pow(kPi, -6.0) * (0.5 - 2.0 / 3.0);
  CHECK(points[0].value <= branch_value + 1e-8);
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].accepted);
    CHECK(points[i].value < 0.0);
    CHECK(points[i].grad_residual < cfg.tol);
    if (i) CHECK(points[i].value >= points[i - 1].value - 1e-12);
  }
  CHECK(dual_fountain_trend(points).ok);
}

TEST_CASE("trace diagnostics") {
  auto dirac = make_dirac(torus(3, 8, {0.5, 0.0, 0.0}));

  SUBCASE("converged descent is a bounded path") {
    Energy energy(dirac, 2.0, Nonlinearity::power(1.0, 1.5));
    SolveConfig cfg;
    CriticalPoint point = global_minimize(energy, cfg);
    REQUIRE(point.accepted);
    PsReport rep = ps_diagnostic(energy, point.trace);
    CHECK(rep.bounded);
    CHECK(rep.final_residual <= cfg.tol);
  }

  SUBCASE("doubling ray is flagged as an expected escape") {
    Energy energy = superlinear_energy(dirac);
    SpinorField u = constant_spinor(dirac->model_ptr(), dirac->spinor_dim(), 1.0);
    Trace trace = ray_doubling_trace(energy, u, 40);
    PsReport rep = ps_diagnostic(energy, trace);
    CHECK_FALSE(rep.bounded);
    CHECK(rep.label.find("not a compactness failure") != std::string::npos);
  }
}
