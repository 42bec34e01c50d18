#ifndef PDIRAC_SRC_MINIMIZE_HPP
#define PDIRAC_SRC_MINIMIZE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "pdirac/lattice.hpp"

namespace pdirac::detail {

/// Golden-section search, fixed iteration count so runs are reproducible.
/// Returns the argmin of fn on [lo, hi].
inline double golden_min(const std::function<double(double)>& fn, double lo, double hi,
                         int iters = 80) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int i = 0; i < iters && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

inline double golden_max(const std::function<double(double)>& fn, double lo, double hi,
                         int iters = 80) {
  return golden_min([&fn](double t) { return -fn(t); }, lo, hi, iters);
}

/// L^2-orthogonal projection coefficients against an orthonormal list.
inline void deflate(SpinorField& f, const std::vector<SpinorField>& basis) {
  for (const SpinorField& b : basis) {
    Complex coef = inner_complex(b, f);
    add_scaled(f, -coef, b);
  }
}

/// Projection onto the complex span of an L^2-orthonormal list.
inline SpinorField project_span(const SpinorField& f, const std::vector<SpinorField>& basis) {
  SpinorField out(f.model, f.spinor_dim);
  for (const SpinorField& b : basis) {
    Complex coef = inner_complex(b, f);
    add_scaled(out, coef, b);
  }
  return out;
}

/// Barzilai-Borwein step estimate from the last two iterates, clamped and
/// with a fallback for non-descent curvature.
inline double bb_step(double ss, double sy, double fallback) {
  if (sy > 0.0 && ss > 0.0) {
    double alpha = ss / sy;
    if (alpha > 1e-14 && alpha < 1e12 && std::isfinite(alpha)) return alpha;
  }
  return fallback;
}

}  // namespace pdirac::detail

#endif
