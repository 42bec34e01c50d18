#ifndef PDIRAC_CRITICAL_HPP
#define PDIRAC_CRITICAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdirac/energy.hpp"
#include "pdirac/solver_trace.hpp"

namespace pdirac {

struct SolveConfig {
  int path_points = 64;
  double tol = 1e-6;   // on residual_norm
  int max_iter = 20000;  // gradient-evaluation budget per run
  double armijo = 1e-4;
  double grow = 2.0;
  double shrink = 0.5;
  std::uint64_t seed = 0;
  int galerkin_k = 0;  // fountain subspace depth override (0: per-sweep k)
  int restarts = 4;    // extra random starts for global_minimize
  double rim_radius = 1e-2;
  int rim_samples = 64;

  void validate() const;
};

enum class PointKind {
  mountain_pass,
  minimizer,
  fountain,
  dual_fountain,
  constant_branch,
};

std::string to_string(PointKind kind);

struct CriticalPoint {
  SpinorField field;
  double value = 0.0;
  double grad_residual = 0.0;
  double nehari = 0.0;
  PointKind kind = PointKind::minimizer;
  int k = 0;  // fountain / dual fountain level, 0 otherwise
  int iterations = 0;
  std::uint64_t seed = 0;
  bool accepted = false;
  std::string message;
  Trace trace;
};

/// Estimated inf of the functional over `samples` seeded random fields
/// scaled to ||psi||_{1,p} = r (projected onto `subspace` first when given).
/// Positive values certify the rim before a mountain-pass run.
double rim_estimate(const Energy& energy, double r, int samples,
                    std::uint64_t seed,
                    const std::vector<SpinorField>* subspace = nullptr);

/// Spatially constant spinor on the branch amplitude
///   (s^p / c)^{1/(e-p)}   for e > p,
///   (c / s^p)^{1/(p-e)}   for e < p,
/// with s the minimal momentum. An exact critical point up to the
/// regularization. Requires an invertible model and a power nonlinearity
/// with e != p.
SpinorField constant_branch(const Energy& energy);

/// Walks t -> 2t from t = 1 until value(t * direction) <= 0 and
/// ||t * direction||_{1,p} > r; at most 60 doublings. Requires a
/// superlinearly classified nonlinearity.
SpinorField find_e(const Energy& energy, const SpinorField& direction,
                   double r, Trace* trace = nullptr);

/// Path-deformation mountain pass: discretize the segment 0 -> e, descend
/// the maximal-energy node transverse to the path, relax the rest, then
/// polish the residual. initial_direction seeds the path ray; by default a
/// random field from the seed, or the top basis field when `subspace` (an
/// L^2-orthonormal list spanning a Galerkin subspace) is given.
CriticalPoint mountain_pass(const Energy& energy, const SolveConfig& config,
                            std::optional<SpinorField> initial_direction = {},
                            const std::vector<SpinorField>* subspace = nullptr);

/// Multi-start descent (constant branch + random starts); returns the
/// lowest-value accepted point. For sublinearly classified nonlinearities.
CriticalPoint global_minimize(const Energy& energy, const SolveConfig& config);

/// For k = 1..kmax, the mountain-pass machinery restricted to the span of
/// the 2k lowest Dirac eigenfields, seeded along the newest eigen-direction.
/// A heuristic realization of the symmetric minimax; per-k failures are
/// reported in the entries without aborting the sweep.
std::vector<CriticalPoint> fountain_sequence(const Energy& energy,
                                             const SolveConfig& config,
                                             int kmax);

/// Negative-energy companions: per subspace level, a line search along the
/// newest eigen-direction locates the negative well, followed by projected
/// descent. The sweep deepens past kmax (up to 8*kmax levels) until kmax
/// distinct critical values are collected; entry k is the k-th smallest
/// distinct value, so the reported sequence is negative and nondecreasing
/// toward zero.
std::vector<CriticalPoint> dual_fountain_sequence(const Energy& energy,
                                                  const SolveConfig& config,
                                                  int kmax);

/// Trend summaries used by the CLI and the acceptance suite.
struct TrendReport {
  bool ok = false;
  std::string message;
};
TrendReport fountain_trend(const std::vector<CriticalPoint>& points);
TrendReport dual_fountain_trend(const std::vector<CriticalPoint>& points);

/// The constant-branch field packaged with its diagnostics.
CriticalPoint constant_branch_point(const Energy& energy);

/// Trace assembled by sampling value(t f) over doublings t = 1, 2, 4, ...;
/// feeds ps_diagnostic's escaping-ray detection.
Trace ray_doubling_trace(const Energy& energy, const SpinorField& f, int doublings);

struct PsReport {
  bool bounded = false;
  double max_norm = 0.0;
  double final_residual = 0.0;
  bool residual_monotone_tail = false;
  std::string label;
};

/// Post-hoc inspection of a solver trace: norm boundedness and residual
/// behaviour after the last restart. Purely diagnostic.
PsReport ps_diagnostic(const Energy& energy, const Trace& trace);

/// Max weak-form defect of D_p psi = H_psi(x, psi) against `count` seeded
/// random test fields (projected onto `subspace` when given), each
/// normalized in ||.||_{1,p}.
double weak_solution_check(const Energy& energy, const SpinorField& psi,
                           int count, std::uint64_t seed,
                           const std::vector<SpinorField>* subspace = nullptr);

}  // namespace pdirac

#endif
