#ifndef PDIRAC_LATTICE_HPP
#define PDIRAC_LATTICE_HPP

#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdirac/clifford.hpp"

namespace pdirac {

/// Flat torus with a chosen spin structure. Fields are stored periodic; the
/// twist enters only through the half-integer momentum shift per direction
/// (twist_j = 1/2 means antiperiodic in direction j after the untwisting
/// gauge transformation).
class TorusModel {
 public:
  TorusModel(int m, std::vector<int> grid, std::vector<double> lengths = {},
             std::vector<double> twist = {});

  int dim() const { return m_; }
  const std::vector<int>& grid() const { return grid_; }
  const std::vector<double>& lengths() const { return lengths_; }
  const std::vector<double>& twist() const { return twist_; }
  std::int64_t sites() const { return sites_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const { return volume_; }

  /// False iff every twist entry is zero, in which case the Dirac operator
  /// has an exact zero mode and all Dirac-based norms degenerate to
  /// seminorms.
  bool invertible() const;

  bool same_shape(const TorusModel& other) const;

 private:
  int m_;
  std::vector<int> grid_;
  std::vector<double> lengths_;
  std::vector<double> twist_;
  std::int64_t sites_;
  double cell_volume_;
  double volume_;
};

using ModelPtr = std::shared_ptr<const TorusModel>;

/// Complex spinor-valued lattice field. values has size sites * spinor_dim,
/// laid out row-major over the grid with the spinor index fastest-varying.
struct SpinorField {
  ModelPtr model;
  int spinor_dim = 0;
  std::vector<Complex> values;

  SpinorField() = default;
  SpinorField(ModelPtr model, int spinor_dim);

  std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
  Complex* data() { return values.data(); }
  const Complex* data() const { return values.data(); }

  /// Fiberwise Hermitian length at a site.
  double fiber_norm(std::int64_t site) const;
};

void check_same_shape(const SpinorField& a, const SpinorField& b);

// Elementwise arithmetic. All functions allocate their result; axpy-style
// helpers mutate the first argument.
SpinorField operator+(const SpinorField& a, const SpinorField& b);
SpinorField operator-(const SpinorField& a, const SpinorField& b);
SpinorField operator*(Complex c, const SpinorField& f);
SpinorField operator*(double c, const SpinorField& f);
SpinorField operator-(const SpinorField& f);
void add_scaled(SpinorField& f, Complex c, const SpinorField& g);  // f += c*g
void scale(SpinorField& f, Complex c);

/// (sum_x cell_volume |f(x)|^p)^(1/p) with |f(x)| the fiber Hermitian
/// length. Deterministic compensated summation in site order. p >= 1.
double lp_norm(const SpinorField& f, double p);

/// Real L^2 pairing sum_x cell_volume Re<f(x), g(x)>.
double inner(const SpinorField& f, const SpinorField& g);

/// Complex L^2 pairing sum_x cell_volume <f(x), g(x)> (antilinear in f).
Complex inner_complex(const SpinorField& f, const SpinorField& g);

double l2_norm(const SpinorField& f);

/// Deterministic pseudo-random field: every component is an independent
/// standard complex normal CN(0,1) drawn by an explicit Box-Muller transform
/// over mt19937_64, so the bytes depend only on the seed.
SpinorField random_field(ModelPtr model, int spinor_dim, std::uint64_t seed);

/// JSON (de)serialization: header carries m, grid, lengths, twist, N; values
/// are a flat [re, im, ...] array in row-major grid order with the spinor
/// index fastest-varying.
void save_field(const SpinorField& f, const std::string& path);
SpinorField load_field(const std::string& path);

}  // namespace pdirac

#endif
