#ifndef PDIRAC_DIRAC_HPP
#define PDIRAC_DIRAC_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "pdirac/clifford.hpp"
#include "pdirac/lattice.hpp"

namespace pdirac {

/// One row of a spectrum dump: a signed eigenvalue of D, its total
/// multiplicity over all modes sharing the magnitude, and a representative
/// mode vector.
struct SpectrumEntry {
  double eigenvalue = 0.0;
  std::int64_t multiplicity = 0;
  std::vector<int> mode;
};

/// One exact Dirac eigenfield e^{2 pi i k.x/L} v with D-eigenvalue s = the
/// signed symbol eigenvalue at mode k. L^2-normalized.
struct DiracEigenfield {
  double s = 0.0;
  std::vector<int> mode;
  Vector fiber;  // symbol eigenvector, unit length
};

/// Discrete Dirac operator on the torus, realized as a Fourier multiplier
/// with the Hermitian symbol i sum_j xi_j(k) gamma_j, where
/// xi_j(k) = 2 pi (k_j + twist_j) / L_j over the centered mode range
/// [-n_j/2, n_j/2). Exact on the grid's trigonometric space.
class DiracOperator {
 public:
  DiracOperator(ModelPtr model, GammaSet gamma);
  ~DiracOperator();

  DiracOperator(const DiracOperator&) = delete;
  DiracOperator& operator=(const DiracOperator&) = delete;

  const TorusModel& model() const { return *model_; }
  ModelPtr model_ptr() const { return model_; }
  const GammaSet& gamma() const { return gamma_; }
  int spinor_dim() const { return gamma_.spinor_dim; }

  /// True iff the model's twist is all zero (exact zero mode at k = 0).
  bool singular() const { return !model_->invertible(); }

  SpinorField apply(const SpinorField& f) const;            // D f
  SpinorField apply_laplacian(const SpinorField& f) const;  // |xi|^2 multiplier
  SpinorField derivative(const SpinorField& f, int axis) const;  // i xi_axis multiplier

  /// D_p f = D((|Df|^2 + eps^2)^{(p-2)/2} Df). p = 2 short-circuits to D^2.
  /// Requires p > 1 and eps >= 0.
  SpinorField apply_p(const SpinorField& f, double p, double eps) const;

  /// ||Df||_p. A seminorm when the operator is singular.
  double sobolev_norm(const SpinorField& f, double p) const;

  /// (||f||_p^p + ||grad f||_p^p)^{1/p} with |grad f| the Euclidean length of
  /// the m-tuple of covariant derivatives.
  double h1p_norm(const SpinorField& f, double p) const;

  /// The `count` smallest eigenvalue magnitudes of D, one row per signed
  /// value, positive sign first, multiplicities aggregated over modes.
  std::vector<SpectrumEntry> spectrum(int count) const;

  /// Smallest |xi(k)| over all modes; positive iff the operator is
  /// invertible. Attained at k = 0.
  double min_momentum() const;

  /// Exact eigenfields sorted by (|s|, -sign(s), mode index). Built lazily.
  const DiracEigenfield& eigenfield_info(std::size_t i) const;
  SpinorField eigenfield(std::size_t i) const;
  std::size_t eigenfield_count() const;

  /// Default regularization used by D_p-based solvers when the caller does
  /// not pin one: 1e-8 for p < 2, 0 otherwise.
  static double default_eps(double p);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ModelPtr model_;
  GammaSet gamma_;
};

using DiracPtr = std::shared_ptr<const DiracOperator>;

/// Convenience factory: builds the gamma set for the model's dimension.
DiracPtr make_dirac(ModelPtr model);

}  // namespace pdirac

#endif
