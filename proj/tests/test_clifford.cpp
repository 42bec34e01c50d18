#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pdirac/clifford.hpp"

using namespace pdirac;

TEST_CASE("construction satisfies the defining relations for m = 2..6") {
  for (int m = 2; m <= 6; ++m) {
    GammaSet g = build_gamma(m);
    CHECK(g.m == m);
    CHECK(g.spinor_dim == (1 << (m / 2)));
    CHECK(static_cast<int>(g.gammas.size()) == m);
    CHECK(check_relations(g) < 1e-14);
  }
}

TEST_CASE("m below 2 is rejected") {
  CHECK_THROWS_AS(build_gamma(1), std::invalid_argument);
  CHECK_THROWS_AS(build_gamma(0), std::invalid_argument);
  CHECK_THROWS_AS(build_gamma(-3), std::invalid_argument);
}

TEST_CASE("each generator squares to minus the identity") {
  GammaSet g = build_gamma(3);
  for (const Matrix& gamma : g.gammas) {
    Matrix sq = gamma * gamma + Matrix::Identity(g.spinor_dim, g.spinor_dim);
    CHECK(sq.cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("defect detector flags broken sets") {
  GammaSet g = build_gamma(2);

  SUBCASE("generator replaced by the identity") {
    g.gammas[0] = Matrix::Identity(2, 2);
    CHECK(check_relations(g) >= 2.0);
  }

  SUBCASE("uniform rescaling by 2") {
    for (Matrix& gamma : g.gammas) gamma *= 2.0;
    CHECK(check_relations(g) >= 6.0);
  }
}

TEST_CASE("m = 4 anticommutators vanish entrywise against direct arithmetic") {
  // Independent check: raw Eigen products, no library helper involved.
  GammaSet g = build_gamma(4);
  Matrix eye = Matrix::Identity(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Matrix acomm = g.gammas[i] * g.gammas[j] + g.gammas[j] * g.gammas[i];
      Matrix expected = (i == j) ? Matrix(-2.0 * eye) : Matrix(Matrix::Zero(4, 4));
      CHECK((acomm - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("momentum symbol squares to |xi|^2 and splits evenly") {
  std::mt19937_64 gen(42);
  auto uniform = [&gen] { return std::generate_canonical<double, 53>(gen) * 2.0 - 1.0; };
  for (int m = 2; m <= 6; ++m) {
    GammaSet g = build_gamma(m);
    const int n = g.spinor_dim;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> xi(static_cast<std::size_t>(m));
      double nsq = 0.0;
      for (double& x : xi) {
        x = uniform();
        nsq += x * x;
      }
      Matrix sym = dirac_symbol(g, xi);
      CHECK((sym - sym.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
      Matrix sq = sym * sym - nsq * Matrix::Identity(n, n);
      CHECK(sq.cwiseAbs().maxCoeff() < 1e-13);

      Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
      const double r = std::sqrt(nsq);
      int plus = 0, minus = 0;
      for (int a = 0; a < n; ++a) {
        CHECK(std::abs(std::abs(es.eigenvalues()(a)) - r) < 1e-13);
        (es.eigenvalues()(a) > 0 ? plus : minus) += 1;
      }
      CHECK(plus == n / 2);
      CHECK(minus == n / 2);
    }
  }
}
