#include "pdirac/lattice.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

namespace pdirac {

namespace {

// Fixed-order compensated accumulator; keeps reductions bit-stable.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

double fiber_norm_sq(const Complex* v, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::norm(v[i]);
  return s;
}

}  // namespace

TorusModel::TorusModel(int m, std::vector<int> grid, std::vector<double> lengths,
                       std::vector<double> twist)
    : m_(m), grid_(std::move(grid)), lengths_(std::move(lengths)), twist_(std::move(twist)) {
  if (m_ < 2) throw std::invalid_argument("TorusModel: dimension must be >= 2");
  if (static_cast<int>(grid_.size()) != m_)
    throw std::invalid_argument("TorusModel: grid size must match dimension");
  if (lengths_.empty()) lengths_.assign(static_cast<std::size_t>(m_), 1.0);
  if (twist_.empty()) twist_.assign(static_cast<std::size_t>(m_), 0.0);
  if (static_cast<int>(lengths_.size()) != m_ || static_cast<int>(twist_.size()) != m_)
    throw std::invalid_argument("TorusModel: lengths/twist size must match dimension");
  for (int n : grid_) {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("TorusModel: grid sizes must be even and >= 4");
  }
  for (double len : lengths_) {
    if (!(len > 0.0)) throw std::invalid_argument("TorusModel: lengths must be positive");
  }
  for (double d : twist_) {
    if (d != 0.0 && d != 0.5)
      throw std::invalid_argument("TorusModel: twist entries must be 0 or 1/2");
  }
  sites_ = 1;
  volume_ = 1.0;
  cell_volume_ = 1.0;
  for (int j = 0; j < m_; ++j) {
    sites_ *= grid_[static_cast<std::size_t>(j)];
    volume_ *= lengths_[static_cast<std::size_t>(j)];
    cell_volume_ *= lengths_[static_cast<std::size_t>(j)] / grid_[static_cast<std::size_t>(j)];
  }
}

bool TorusModel::invertible() const {
  for (double d : twist_)
    if (d != 0.0) return true;
  return false;
}

bool TorusModel::same_shape(const TorusModel& other) const {
  return m_ == other.m_ && grid_ == other.grid_ && lengths_ == other.lengths_ &&
         twist_ == other.twist_;
}

SpinorField::SpinorField(ModelPtr model_in, int spinor_dim_in)
    : model(std::move(model_in)), spinor_dim(spinor_dim_in) {
  values.assign(static_cast<std::size_t>(model->sites()) * static_cast<std::size_t>(spinor_dim),
                Complex{0.0, 0.0});
}

double SpinorField::fiber_norm(std::int64_t site) const {
  return std::sqrt(fiber_norm_sq(values.data() + site * spinor_dim, spinor_dim));
}

void check_same_shape(const SpinorField& a, const SpinorField& b) {
  if (!a.model || !b.model || a.spinor_dim != b.spinor_dim ||
      a.values.size() != b.values.size() || !a.model->same_shape(*b.model))
    throw std::invalid_argument("spinor fields have mismatched shape or model");
}

SpinorField operator+(const SpinorField& a, const SpinorField& b) {
  check_same_shape(a, b);
  SpinorField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

SpinorField operator-(const SpinorField& a, const SpinorField& b) {
  check_same_shape(a, b);
  SpinorField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

SpinorField operator*(Complex c, const SpinorField& f) {
  SpinorField out = f;
  for (auto& v : out.values) v *= c;
  return out;
}

SpinorField operator*(double c, const SpinorField& f) { return Complex{c, 0.0} * f; }

SpinorField operator-(const SpinorField& f) { return Complex{-1.0, 0.0} * f; }

void add_scaled(SpinorField& f, Complex c, const SpinorField& g) {
  check_same_shape(f, g);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += c * g.values[i];
}

void scale(SpinorField& f, Complex c) {
  for (auto& v : f.values) v *= c;
}

double lp_norm(const SpinorField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  const double w = f.model->cell_volume();
  const std::int64_t sites = f.model->sites();
  KahanSum acc;
  if (p == 2.0) {
    for (std::int64_t s = 0; s < sites; ++s)
      acc.add(fiber_norm_sq(f.values.data() + s * f.spinor_dim, f.spinor_dim));
    return std::sqrt(w * acc.value());
  }
  const double half_p = 0.5 * p;
  for (std::int64_t s = 0; s < sites; ++s) {
    double nsq = fiber_norm_sq(f.values.data() + s * f.spinor_dim, f.spinor_dim);
    acc.add(nsq > 0.0 ? std::pow(nsq, half_p) : 0.0);
  }
  return std::pow(w * acc.value(), 1.0 / p);
}

double inner(const SpinorField& f, const SpinorField& g) {
  check_same_shape(f, g);
  KahanSum acc;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    acc.add(f.values[i].real() * g.values[i].real() + f.values[i].imag() * g.values[i].imag());
  }
  return f.model->cell_volume() * acc.value();
}

Complex inner_complex(const SpinorField& f, const SpinorField& g) {
  check_same_shape(f, g);
  KahanSum re, im;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    Complex t = std::conj(f.values[i]) * g.values[i];
    re.add(t.real());
    im.add(t.imag());
  }
  return f.model->cell_volume() * Complex{re.value(), im.value()};
}

double l2_norm(const SpinorField& f) { return lp_norm(f, 2.0); }

SpinorField random_field(ModelPtr model, int spinor_dim, std::uint64_t seed) {
  SpinorField out(std::move(model), spinor_dim);
  std::mt19937_64 gen(seed);
  auto uniform = [&gen]() {
    // 53-bit mantissa draw in (0, 1]; avoids log(0) below.
    return (static_cast<double>(gen() >> 11) + 1.0) * 0x1p-53;
  };
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (auto& v : out.values) {
    // Box-Muller with modulus sqrt(-log u): real and imaginary parts are
    // N(0, 1/2), so E|v|^2 = 1.
    double r = std::sqrt(-std::log(uniform()));
    double phi = two_pi * uniform();
    v = Complex{r * std::cos(phi), r * std::sin(phi)};
  }
  return out;
}

void save_field(const SpinorField& f, const std::string& path) {
  nlohmann::json j;
  j["header"] = {{"m", f.model->dim()},
                 {"grid", f.model->grid()},
                 {"lengths", f.model->lengths()},
                 {"twist", f.model->twist()},
                 {"N", f.spinor_dim}};
  std::vector<double> flat;
  flat.reserve(f.values.size() * 2);
  for (const Complex& v : f.values) {
    flat.push_back(v.real());
    flat.push_back(v.imag());
  }
  j["values"] = std::move(flat);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_field: cannot open " + path);
  out << j.dump(2) << '\n';
}

SpinorField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_field: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  const auto& h = j.at("header");
  auto model = std::make_shared<TorusModel>(
      h.at("m").get<int>(), h.at("grid").get<std::vector<int>>(),
      h.at("lengths").get<std::vector<double>>(), h.at("twist").get<std::vector<double>>());
  SpinorField f(model, h.at("N").get<int>());
  const auto& flat = j.at("values");
  if (flat.size() != f.values.size() * 2)
    throw std::runtime_error("load_field: value array has wrong length");
  for (std::size_t i = 0; i < f.values.size(); ++i)
    f.values[i] = Complex{flat[2 * i].get<double>(), flat[2 * i + 1].get<double>()};
  return f;
}

}  // namespace pdirac
