#ifndef PDIRAC_ENERGY_HPP
#define PDIRAC_ENERGY_HPP

#include <memory>
#include <string>

#include "pdirac/dirac.hpp"

namespace pdirac {

/// Built-in nonlinearity family. `power` is
///   H(psi)     = (c/e) ((|psi|^2 + eps_h^2)^{e/2} - eps_h^e),
///   H_psi(psi) = c (|psi|^2 + eps_h^2)^{(e-2)/2} psi,
/// so H_psi is exactly the fiber gradient of H for every eps_h, and at
/// eps_h = 0 they reduce to (c/e)|psi|^e and c|psi|^{e-2} psi.
struct Nonlinearity {
  enum class Kind { zero, power };

  Kind kind = Kind::zero;
  double c = 0.0;
  double e = 2.0;
  double eps_h = 0.0;

  static Nonlinearity zero();
  /// eps_h < 0 picks the default: 0 for e >= 2, 1e-8 for e < 2.
  static Nonlinearity power(double c, double e, double eps_h = -1.0);

  /// Pointwise H given the squared fiber length.
  double density(double norm_sq) const;
  /// Pointwise radial factor of H_psi: H_psi = factor(|psi|^2) * psi.
  double prime_factor(double norm_sq) const;
};

/// Which structural growth conditions a nonlinearity satisfies relative to
/// the exponent p and dimension m (critical exponent p* = mp/(m-p)).
struct Classification {
  bool h1 = false;   // |H_psi| <= C (1 + |psi|^{q-1}), q in (p, p*)
  bool h2 = false;   // 0 < mu H <= <H_psi, psi> for large |psi|, mu > p
  bool h3 = false;   // H = o(|psi|^p) at 0
  bool h4 = false;   // evenness
  bool hi = false;   // |H_psi| <= C (1 + |psi|^{q-1}), 1 < q < p
  bool hii = false;  // C |psi|^nu <= H, 1 < nu < p
  double q = 0.0;
  double mu = 0.0;
  double nu = 0.0;

  bool superlinear() const { return h1 && h2 && h3; }
  bool sublinear() const { return hi; }
  std::string to_json() const;
};

Classification classify(const Nonlinearity& nl, double p, int m);

double critical_exponent(double p, int m);  // mp/(m-p); +inf for p >= m

/// int_M H(x, f(x)) dx.
double hcal(const Nonlinearity& nl, const SpinorField& f);

/// The density field H_psi(x, f(x)); its L^2 pairing with a test field is
/// the directional derivative of hcal.
SpinorField hcal_prime(const Nonlinearity& nl, const SpinorField& f);

/// The functional (1/p) int |Df|^p - int H(x, f). Its critical points are
/// the weak solutions of D_p psi = H_psi(x, psi).
class Energy {
 public:
  /// eps < 0 picks the by-p default regularization for the D_p gradient.
  /// Rejects p outside (1, m) unless override_p_range is set.
  Energy(DiracPtr dirac, double p, Nonlinearity nl, double eps = -1.0,
         bool override_p_range = false);

  const DiracOperator& dirac() const { return *dirac_; }
  DiracPtr dirac_ptr() const { return dirac_; }
  double p() const { return p_; }
  double eps() const { return eps_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  Classification classification() const;

  double value(const SpinorField& f) const;

  /// L^2-Riesz representative of the derivative: D_p f - H_psi(x, f), with
  /// the configured regularizations. inner(gradient(f), xi) is the
  /// directional derivative of value at f along xi up to O(eps^2).
  SpinorField gradient(const SpinorField& f) const;

  /// Dual-exponent surrogate for the derivative's dual norm:
  /// || gradient(f) ||_{p/(p-1)}.
  double residual_norm(const SpinorField& f) const;

  /// |  ||Df||_p^p - <H_psi(f), f>  | / max(1, ||Df||_p^p). Zero at critical
  /// points.
  double nehari_defect(const SpinorField& f) const;

  /// Action of the second derivative at `at` on `dir` (real-linear).
  SpinorField hessian_apply(const SpinorField& at, const SpinorField& dir) const;

 private:
  DiracPtr dirac_;
  double p_;
  double eps_;
  Nonlinearity nl_;
};

}  // namespace pdirac

#endif
