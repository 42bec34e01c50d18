#ifndef PDIRAC_CLIFFORD_HPP
#define PDIRAC_CLIFFORD_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace pdirac {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// A concrete complex Clifford representation in dimension m: a list of m
/// anti-Hermitian, mutually anticommuting N x N matrices with
/// g_i g_j + g_j g_i = -2 delta_ij I, where N = 2^floor(m/2).
struct GammaSet {
  int m = 0;
  int spinor_dim = 0;
  std::vector<Matrix> gammas;

  const Matrix& gamma(int i) const { return gammas.at(static_cast<std::size_t>(i)); }
};

/// Number of spinor components in dimension m.
int spinor_dimension(int m);

/// Builds the standard tensor-product representation. Deterministic for
/// fixed m; rejects m < 2.
GammaSet build_gamma(int m);

/// Largest anticommutator defect max_{i,j} |g_i g_j + g_j g_i + 2 delta_ij I|
/// plus the largest anti-Hermiticity defect max_i |g_i^* + g_i|
/// (entrywise sup norms).
double check_relations(const GammaSet& g);

/// The momentum symbol i * sum_j xi_j g_j. Hermitian with eigenvalues
/// +-|xi|, each of multiplicity N/2.
Matrix dirac_symbol(const GammaSet& g, const std::vector<double>& xi);

}  // namespace pdirac

#endif
