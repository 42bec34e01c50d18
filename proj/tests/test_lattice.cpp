#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "pdirac/lattice.hpp"
#include "test_util.hpp"

using namespace pdirac;
using namespace pdirac::testutil;

TEST_CASE("model validation") {
  CHECK_THROWS_AS(TorusModel(1, {4}), std::invalid_argument);
  CHECK_THROWS_AS(TorusModel(2, {4}), std::invalid_argument);            // wrong rank
  CHECK_THROWS_AS(TorusModel(2, {4, 5}), std::invalid_argument);         // odd
  CHECK_THROWS_AS(TorusModel(2, {4, 2}), std::invalid_argument);         // too small
  CHECK_THROWS_AS(TorusModel(2, {4, 4}, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(TorusModel(2, {4, 4}, {}, {0.25, 0.0}), std::invalid_argument);

  TorusModel m(3, {4, 6, 8}, {1.0, 2.0, 3.0}, {0.5, 0.0, 0.5});
  CHECK(m.sites() == 4 * 6 * 8);
  CHECK(m.volume() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(m.volume() == doctest::Approx(m.cell_volume() * m.sites()).epsilon(1e-15));
  CHECK(m.invertible());
  CHECK_FALSE(TorusModel(2, {4, 4}).invertible());
}

TEST_CASE("lp norms: closed cases") {
  auto model = torus(2, 4, {0.5, 0.0});
  SpinorField zero(model, 2);
  SpinorField ones = constant_spinor(model, 2, 1.0);

  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    CHECK(lp_norm(zero, p) == 0.0);
    CHECK(lp_norm(ones, p) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(lp_norm(ones, 0.5), std::invalid_argument);

  // Fiber length 2 on exactly half the cells of the unit torus, p = 2:
  // (0.5 * 4)^(1/2).
  SpinorField half(model, 2);
  for (std::int64_t s = 0; s < model->sites() / 2; ++s)
    half.values[static_cast<std::size_t>(2 * s)] = 2.0;
  CHECK(lp_norm(half, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("real pairing") {
  auto model = torus(2, 4, {0.5, 0.0});
  SpinorField f = random_field(model, 2, 11);
  SpinorField g = random_field(model, 2, 12);

  CHECK(inner(f, f) == doctest::Approx(lp_norm(f, 2.0) * lp_norm(f, 2.0)).epsilon(1e-13));

  SpinorField u = constant_spinor(model, 2, Complex{1.0, 0.5});
  SpinorField iu = Complex{0.0, 1.0} * u;
  CHECK(inner(u, iu) == doctest::Approx(0.0).epsilon(1e-15));

  // Brute-force elementwise oracle.
  double expected = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    expected += f.values[i].real() * g.values[i].real() + f.values[i].imag() * g.values[i].imag();
  expected *= model->cell_volume();
  CHECK(inner(f, g) == doctest::Approx(expected).epsilon(1e-12));

  SpinorField other(torus(2, 6, {0.5, 0.0}), 2);
  CHECK_THROWS_AS(inner(f, other), std::invalid_argument);
}

TEST_CASE("seeded fields are reproducible") {
  auto model = torus(2, 4, {0.5, 0.0});
  SpinorField a = random_field(model, 2, 0);
  SpinorField b = random_field(model, 2, 0);
  SpinorField c = random_field(model, 2, 1);
  CHECK(a.values == b.values);
  bool differs = false;
  for (std::size_t i = 0; i < a.values.size(); ++i) differs = differs || a.values[i] != c.values[i];
  CHECK(differs);
  CHECK(lp_norm(a, 2.0) > 0.0);
}

TEST_CASE("Holder pairing bound over random pairs") {
  auto model = torus(2, 6, {0.5, 0.5});
  for (double p : {1.5, 2.0, 3.0}) {
    const double q = p / (p - 1.0);
    for (int t = 0; t < 100; ++t) {
      SpinorField f = random_field(model, 2, 1000 + t);
      SpinorField g = random_field(model, 2, 2000 + t);
      CHECK(std::abs(inner(f, g)) <= lp_norm(f, p) * lp_norm(g, q) + 1e-12);
    }
  }
}

TEST_CASE("absolute 1-homogeneity") {
  auto model = torus(2, 6, {0.5, 0.0});
  SpinorField f = random_field(model, 2, 5);
  for (double p : {1.5, 2.0, 3.0}) {
    for (double c : {-2.5, 0.25, 3.0}) {
      CHECK(lp_norm(c * f, p) ==
            doctest::Approx(std::abs(c) * lp_norm(f, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("serialization round trip") {
  auto model = torus(3, 4, {0.5, 0.0, 0.5}, {1.0, 2.0, 0.5});
  SpinorField f = random_field(model, 2, 77);
  const std::string path =
      (std::filesystem::temp_directory_path() / "pdirac_field_roundtrip.json").string();
  save_field(f, path);
  SpinorField g = load_field(path);
  std::remove(path.c_str());

  REQUIRE(g.values.size() == f.values.size());
  CHECK(g.model->same_shape(*f.model));
  CHECK(g.values == f.values);
}
