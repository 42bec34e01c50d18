#include "pdirac/clifford.hpp"

#include <cmath>
#include <stdexcept>

namespace pdirac {

namespace {

const Complex kI{0.0, 1.0};

Matrix pauli(int which) {
  Matrix s(2, 2);
  switch (which) {
    case 1:
      s << 0, 1, 1, 0;
      break;
    case 2:
      s << 0, -kI, kI, 0;
      break;
    default:
      s << 1, 0, 0, -1;
      break;
  }
  return s;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double sup_norm(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

int spinor_dimension(int m) {
  if (m < 2) throw std::invalid_argument("spinor_dimension: m must be >= 2");
  return 1 << (m / 2);
}

GammaSet build_gamma(int m) {
  if (m < 2) throw std::invalid_argument("build_gamma: m must be >= 2");

  // Base cases: i*sigma_1, i*sigma_2 (and i*sigma_3 for m = 3). The
  // recursion m -> m+2 doubles the spinor space:
  //   g_j -> g_j (x) sigma_3,  plus  I (x) i sigma_1,  I (x) i sigma_2.
  int base = (m % 2 == 0) ? 2 : 3;
  std::vector<Matrix> gammas;
  gammas.reserve(static_cast<std::size_t>(m));
  for (int j = 1; j <= std::min(base, m); ++j) gammas.push_back(kI * pauli(j));

  for (int cur = base; cur < m; cur += 2) {
    const Eigen::Index n = gammas.front().rows();
    Matrix eye = Matrix::Identity(n, n);
    std::vector<Matrix> next;
    next.reserve(gammas.size() + 2);
    for (const Matrix& g : gammas) next.push_back(kron(g, pauli(3)));
    next.push_back(kron(eye, kI * pauli(1)));
    next.push_back(kron(eye, kI * pauli(2)));
    gammas = std::move(next);
  }

  GammaSet out;
  out.m = m;
  out.spinor_dim = spinor_dimension(m);
  out.gammas = std::move(gammas);
  return out;
}

double check_relations(const GammaSet& g) {
  const auto n = static_cast<Eigen::Index>(g.spinor_dim);
  Matrix eye = Matrix::Identity(n, n);
  double anticommutator = 0.0;
  double hermiticity = 0.0;
  for (std::size_t i = 0; i < g.gammas.size(); ++i) {
    hermiticity = std::max(hermiticity, sup_norm(g.gammas[i].adjoint() + g.gammas[i]));
    for (std::size_t j = 0; j < g.gammas.size(); ++j) {
      Matrix acomm = g.gammas[i] * g.gammas[j] + g.gammas[j] * g.gammas[i];
      if (i == j) acomm += 2.0 * eye;
      anticommutator = std::max(anticommutator, sup_norm(acomm));
    }
  }
  return anticommutator + hermiticity;
}

Matrix dirac_symbol(const GammaSet& g, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != g.m)
    throw std::invalid_argument("dirac_symbol: xi has wrong dimension");
  const auto n = static_cast<Eigen::Index>(g.spinor_dim);
  Matrix sym = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < xi.size(); ++j) sym += xi[j] * g.gammas[j];
  return kI * sym;
}

}  // namespace pdirac
