#ifndef PDIRAC_EIGEN_HPP
#define PDIRAC_EIGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pdirac/dirac.hpp"
#include "pdirac/solver_trace.hpp"

namespace pdirac {

struct EigenConfig {
  double p = 2.0;
  double tolerance = 1e-8;  // on the dual-exponent eigen-equation residual
  int max_iter = 5000;      // per restart
  double armijo = 1e-4;
  double grow = 2.0;
  double shrink = 0.5;
  int restarts = 8;
  double eps = -1.0;  // < 0: by-p default
  std::uint64_t seed = 0;
  bool override_p_range = false;

  void validate() const;
};

struct EigenPair {
  double lambda = 0.0;
  SpinorField field;  // ||field||_p = 1
  double residual = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  bool accepted = false;
  std::string message;
  Trace trace;
};

/// ||Df||_p^p / ||f||_p^p. Scale-invariant; rejects the zero field.
double rayleigh(const DiracOperator& dirac, double p, const SpinorField& f);

/// Smallest eigenvalue of D_p psi = lambda |psi|^{p-2} psi by projected
/// descent on the Rayleigh quotient over the unit L^p sphere, best of
/// `restarts` seeded starts. Winner: accepted runs first, then smallest
/// lambda, then smallest residual, then seed.
EigenPair min_eigen(const DiracOperator& dirac, const EigenConfig& config);

/// First n eigenvalues in nondecreasing order, approximated by Galerkin
/// restriction to the 2n lowest Dirac eigenfields plus successive
/// L^2-orthogonal deflation. Exact for p = 2; a documented heuristic
/// otherwise. May return a partial list (check per-pair accepted flags).
std::vector<EigenPair> ls_sequence(const DiracOperator& dirac,
                                   const EigenConfig& config, int n);

/// Max weak-form defect |int <|Df|^{p-2} Df, D phi> - lambda int
/// <|f|^{p-2} f, phi>| over f/||f|| and the test_count lowest Dirac
/// eigenfields, each normalized in ||.||_{1,p}.
double weak_eigen_check(const DiracOperator& dirac, double p, double lambda,
                        const SpinorField& f, int test_count);

struct MonotoneResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// <Bf - Bg, f - g> vs (||f||^{p-1} - ||g||^{p-1})(||f|| - ||g||) in the
/// ||.||_{1,p} norm, with B the unregularized D_p. holds iff
/// lhs >= rhs - 1e-10.
MonotoneResult monotone_inequality_check(const DiracOperator& dirac, double p,
                                         const SpinorField& f,
                                         const SpinorField& g);

struct TailResult {
  double tau = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool accepted = false;
  std::string message;
};

/// tau_k = inf ||u||_{1,p} over ||u||_q = 1 in the orthogonal complement of
/// the k lowest Dirac eigenfields. For p = q = 2 this is the (k+1)-th
/// smallest |D|-eigenvalue. Requires 1 <= q < p*.
TailResult tail_embedding_constant(const DiracOperator& dirac, double p,
                                   double q, int k,
                                   const EigenConfig& config = {});

}  // namespace pdirac

#endif
