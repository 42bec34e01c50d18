#include "pdirac/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace pdirac {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<int> centered_mode(const std::vector<int>& grid, std::int64_t flat) {
  const int m = static_cast<int>(grid.size());
  std::vector<int> k(static_cast<std::size_t>(m));
  for (int j = m - 1; j >= 0; --j) {
    int n = grid[static_cast<std::size_t>(j)];
    int t = static_cast<int>(flat % n);
    flat /= n;
    k[static_cast<std::size_t>(j)] = (t < n / 2) ? t : t - n;
  }
  return k;
}

}  // namespace

struct DiracOperator::Impl {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<Complex> momenta;       // sites * m, xi_j(k) in mode layout
  std::vector<double> momenta_sq;     // sites, |xi(k)|^2
  std::vector<Complex> symbols;       // sites * N * N, row-major per mode
  double min_momentum = 0.0;
  mutable std::vector<DiracEigenfield> basis;  // lazily sorted eigenfields
  mutable std::once_flag basis_once;

  ~Impl() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

DiracOperator::DiracOperator(ModelPtr model, GammaSet gamma)
    : impl_(std::make_unique<Impl>()), model_(std::move(model)), gamma_(std::move(gamma)) {
  if (gamma_.m != model_->dim())
    throw std::invalid_argument("DiracOperator: gamma set dimension must match the model");
  const int m = model_->dim();
  const int n_spin = gamma_.spinor_dim;
  const std::int64_t sites = model_->sites();

  // Momentum table over the centered mode range [-n/2, n/2) per axis.
  impl_->momenta.resize(static_cast<std::size_t>(sites * m));
  impl_->momenta_sq.resize(static_cast<std::size_t>(sites));
  impl_->symbols.assign(static_cast<std::size_t>(sites) * n_spin * n_spin, Complex{});
  double min_sq = std::numeric_limits<double>::infinity();
  std::vector<double> xi(static_cast<std::size_t>(m));
  for (std::int64_t s = 0; s < sites; ++s) {
    auto k = centered_mode(model_->grid(), s);
    double sq = 0.0;
    for (int j = 0; j < m; ++j) {
      xi[static_cast<std::size_t>(j)] =
          kTwoPi * (k[static_cast<std::size_t>(j)] + model_->twist()[static_cast<std::size_t>(j)]) /
          model_->lengths()[static_cast<std::size_t>(j)];
      impl_->momenta[static_cast<std::size_t>(s * m + j)] = xi[static_cast<std::size_t>(j)];
      sq += xi[static_cast<std::size_t>(j)] * xi[static_cast<std::size_t>(j)];
    }
    impl_->momenta_sq[static_cast<std::size_t>(s)] = sq;
    min_sq = std::min(min_sq, sq);
    Matrix sym = dirac_symbol(gamma_, xi);
    for (int a = 0; a < n_spin; ++a)
      for (int b = 0; b < n_spin; ++b)
        impl_->symbols[(static_cast<std::size_t>(s) * n_spin + a) * n_spin + b] = sym(a, b);
  }
  impl_->min_momentum = std::sqrt(min_sq);

  // One multi-axis plan transforming all spinor components at once
  // (stride = N, dist = 1 matches the spinor-fastest layout).
  std::vector<int> dims(model_->grid().begin(), model_->grid().end());
  std::vector<Complex> a(static_cast<std::size_t>(sites) * n_spin),
      b(static_cast<std::size_t>(sites) * n_spin);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  impl_->forward = fftw_plan_many_dft(m, dims.data(), n_spin, pa, nullptr, n_spin, 1, pb,
                                      nullptr, n_spin, 1, FFTW_FORWARD, flags);
  impl_->backward = fftw_plan_many_dft(m, dims.data(), n_spin, pa, nullptr, n_spin, 1, pb,
                                       nullptr, n_spin, 1, FFTW_BACKWARD, flags);
  if (!impl_->forward || !impl_->backward)
    throw std::runtime_error("DiracOperator: FFT planning failed");
}

DiracOperator::~DiracOperator() = default;

namespace {

void run_plan(fftw_plan plan, const SpinorField& in, SpinorField& out) {
  auto* pin = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.values.data()));
  auto* pout = reinterpret_cast<fftw_complex*>(out.values.data());
  fftw_execute_dft(plan, pin, pout);
}

}  // namespace

SpinorField DiracOperator::apply(const SpinorField& f) const {
  if (f.spinor_dim != gamma_.spinor_dim || !f.model->same_shape(*model_))
    throw std::invalid_argument("apply: field does not match the operator");
  const int n_spin = gamma_.spinor_dim;
  const std::int64_t sites = model_->sites();
  SpinorField hat(f.model, n_spin), out(f.model, n_spin);
  run_plan(impl_->forward, f, hat);
  const double norm = 1.0 / static_cast<double>(sites);
  for (std::int64_t s = 0; s < sites; ++s) {
    const Complex* sym = impl_->symbols.data() + static_cast<std::size_t>(s) * n_spin * n_spin;
    const Complex* x = hat.values.data() + s * n_spin;
    Complex* y = out.values.data() + s * n_spin;
    for (int a = 0; a < n_spin; ++a) {
      Complex acc{};
      for (int b = 0; b < n_spin; ++b) acc += sym[a * n_spin + b] * x[b];
      y[a] = acc * norm;
    }
  }
  SpinorField result(f.model, n_spin);
  run_plan(impl_->backward, out, result);
  return result;
}

SpinorField DiracOperator::apply_laplacian(const SpinorField& f) const {
  if (f.spinor_dim != gamma_.spinor_dim || !f.model->same_shape(*model_))
    throw std::invalid_argument("apply_laplacian: field does not match the operator");
  const int n_spin = gamma_.spinor_dim;
  const std::int64_t sites = model_->sites();
  SpinorField hat(f.model, n_spin);
  run_plan(impl_->forward, f, hat);
  const double norm = 1.0 / static_cast<double>(sites);
  for (std::int64_t s = 0; s < sites; ++s) {
    const double mult = impl_->momenta_sq[static_cast<std::size_t>(s)] * norm;
    for (int a = 0; a < n_spin; ++a) hat.values[static_cast<std::size_t>(s * n_spin + a)] *= mult;
  }
  SpinorField result(f.model, n_spin);
  run_plan(impl_->backward, hat, result);
  return result;
}

SpinorField DiracOperator::derivative(const SpinorField& f, int axis) const {
  if (axis < 0 || axis >= model_->dim())
    throw std::invalid_argument("derivative: axis out of range");
  const int n_spin = gamma_.spinor_dim;
  const int m = model_->dim();
  const std::int64_t sites = model_->sites();
  SpinorField hat(f.model, n_spin);
  run_plan(impl_->forward, f, hat);
  const double norm = 1.0 / static_cast<double>(sites);
  for (std::int64_t s = 0; s < sites; ++s) {
    const Complex mult =
        Complex{0.0, 1.0} * impl_->momenta[static_cast<std::size_t>(s * m + axis)] * norm;
    for (int a = 0; a < n_spin; ++a) hat.values[static_cast<std::size_t>(s * n_spin + a)] *= mult;
  }
  SpinorField result(f.model, n_spin);
  run_plan(impl_->backward, hat, result);
  return result;
}

SpinorField DiracOperator::apply_p(const SpinorField& f, double p, double eps) const {
  if (!(p > 1.0)) throw std::invalid_argument("apply_p: p must be > 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("apply_p: eps must be >= 0");
  for (const Complex& v : f.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::invalid_argument("apply_p: field has non-finite entries");
  }
  SpinorField g = apply(f);
  if (p == 2.0) return apply(g);
  const int n_spin = f.spinor_dim;
  const std::int64_t sites = model_->sites();
  const double expo = 0.5 * (p - 2.0);
  for (std::int64_t s = 0; s < sites; ++s) {
    double nsq = 0.0;
    Complex* gv = g.values.data() + s * n_spin;
    for (int a = 0; a < n_spin; ++a) nsq += std::norm(gv[a]);
    const double shifted = nsq + eps * eps;
    // At an exact zero of Df the density |Df|^{p-2} Df has limit 0 for p > 1.
    const double w = shifted > 0.0 ? std::pow(shifted, expo) : 0.0;
    for (int a = 0; a < n_spin; ++a) gv[a] *= w;
  }
  return apply(g);
}

double DiracOperator::sobolev_norm(const SpinorField& f, double p) const {
  return lp_norm(apply(f), p);
}

double DiracOperator::h1p_norm(const SpinorField& f, double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("h1p_norm: p must be >= 1");
  const int n_spin = f.spinor_dim;
  const std::int64_t sites = model_->sites();
  std::vector<double> grad_sq(static_cast<std::size_t>(sites), 0.0);
  for (int j = 0; j < model_->dim(); ++j) {
    SpinorField dj = derivative(f, j);
    for (std::int64_t s = 0; s < sites; ++s) {
      double nsq = 0.0;
      for (int a = 0; a < n_spin; ++a) nsq += std::norm(dj.values[static_cast<std::size_t>(s * n_spin + a)]);
      grad_sq[static_cast<std::size_t>(s)] += nsq;
    }
  }
  double acc = 0.0, carry = 0.0;
  auto kahan = [&acc, &carry](double x) {
    double y = x - carry;
    double t = acc + y;
    carry = (t - acc) - y;
    acc = t;
  };
  const double half_p = 0.5 * p;
  for (std::int64_t s = 0; s < sites; ++s) {
    double fsq = 0.0;
    for (int a = 0; a < n_spin; ++a) fsq += std::norm(f.values[static_cast<std::size_t>(s * n_spin + a)]);
    kahan((fsq > 0.0 ? std::pow(fsq, half_p) : 0.0) +
          (grad_sq[static_cast<std::size_t>(s)] > 0.0
               ? std::pow(grad_sq[static_cast<std::size_t>(s)], half_p)
               : 0.0));
  }
  return std::pow(model_->cell_volume() * acc, 1.0 / p);
}

std::vector<SpectrumEntry> DiracOperator::spectrum(int count) const {
  if (count < 1) throw std::invalid_argument("spectrum: count must be >= 1");
  const std::int64_t sites = model_->sites();
  std::vector<std::int64_t> order(static_cast<std::size_t>(sites));
  for (std::int64_t s = 0; s < sites; ++s) order[static_cast<std::size_t>(s)] = s;
  std::sort(order.begin(), order.end(), [this](std::int64_t a, std::int64_t b) {
    double qa = impl_->momenta_sq[static_cast<std::size_t>(a)];
    double qb = impl_->momenta_sq[static_cast<std::size_t>(b)];
    if (qa != qb) return qa < qb;
    return centered_mode(model_->grid(), a) < centered_mode(model_->grid(), b);
  });

  std::vector<SpectrumEntry> out;
  const std::int64_t half = gamma_.spinor_dim / 2;
  std::size_t i = 0;
  while (i < order.size() && static_cast<int>(out.size()) < count) {
    double sq = impl_->momenta_sq[static_cast<std::size_t>(order[i])];
    std::size_t j = i;
    while (j < order.size() &&
           impl_->momenta_sq[static_cast<std::size_t>(order[j])] <= sq * (1.0 + 1e-12) + 1e-300)
      ++j;
    const auto group = static_cast<std::int64_t>(j - i);
    std::vector<int> rep = centered_mode(model_->grid(), order[i]);
    double mag = std::sqrt(sq);
    if (mag == 0.0) {
      out.push_back({0.0, group * gamma_.spinor_dim, rep});
    } else {
      out.push_back({mag, group * half, rep});
      if (static_cast<int>(out.size()) < count) out.push_back({-mag, group * half, rep});
    }
    i = j;
  }
  return out;
}

double DiracOperator::min_momentum() const { return impl_->min_momentum; }

namespace {

void build_basis(const TorusModel& model, const GammaSet& gamma,
                 const std::vector<Complex>& momenta, std::vector<DiracEigenfield>& basis) {
  const std::int64_t sites = model.sites();
  const int m = model.dim();
  const int n_spin = gamma.spinor_dim;
  basis.reserve(static_cast<std::size_t>(sites) * n_spin);
  std::vector<double> xi(static_cast<std::size_t>(m));
  for (std::int64_t s = 0; s < sites; ++s) {
    for (int j = 0; j < m; ++j)
      xi[static_cast<std::size_t>(j)] = momenta[static_cast<std::size_t>(s * m + j)].real();
    Matrix sym = dirac_symbol(gamma, xi);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    auto k = centered_mode(model.grid(), s);
    for (int a = 0; a < n_spin; ++a) {
      DiracEigenfield e;
      e.s = es.eigenvalues()(a);
      e.mode = k;
      e.fiber = es.eigenvectors().col(a);
      basis.push_back(std::move(e));
    }
  }
  std::stable_sort(basis.begin(), basis.end(),
                   [](const DiracEigenfield& a, const DiracEigenfield& b) {
                     double ma = std::abs(a.s), mb = std::abs(b.s);
                     if (ma != mb) return ma < mb;
                     if (a.s != b.s) return a.s > b.s;  // + branch first
                     return a.mode < b.mode;
                   });
}

}  // namespace

const DiracEigenfield& DiracOperator::eigenfield_info(std::size_t i) const {
  std::call_once(impl_->basis_once, [this] {
    build_basis(*model_, gamma_, impl_->momenta, impl_->basis);
  });
  return impl_->basis.at(i);
}

std::size_t DiracOperator::eigenfield_count() const {
  return static_cast<std::size_t>(model_->sites()) * static_cast<std::size_t>(gamma_.spinor_dim);
}

SpinorField DiracOperator::eigenfield(std::size_t i) const {
  const DiracEigenfield& info = eigenfield_info(i);
  const int m = model_->dim();
  const int n_spin = gamma_.spinor_dim;
  const std::int64_t sites = model_->sites();
  SpinorField f(model_, n_spin);
  const double amp = 1.0 / std::sqrt(model_->volume());
  // Phase accumulates axis by axis over the row-major site order.
  std::vector<double> freq(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    freq[static_cast<std::size_t>(j)] =
        kTwoPi * info.mode[static_cast<std::size_t>(j)] / model_->grid()[static_cast<std::size_t>(j)];
  std::vector<std::int64_t> coord(static_cast<std::size_t>(m), 0);
  for (std::int64_t s = 0; s < sites; ++s) {
    double phase = 0.0;
    for (int j = 0; j < m; ++j)
      phase += freq[static_cast<std::size_t>(j)] * static_cast<double>(coord[static_cast<std::size_t>(j)]);
    const Complex factor = amp * Complex{std::cos(phase), std::sin(phase)};
    for (int a = 0; a < n_spin; ++a)
      f.values[static_cast<std::size_t>(s * n_spin + a)] = factor * info.fiber(a);
    for (int j = m - 1; j >= 0; --j) {
      if (++coord[static_cast<std::size_t>(j)] < model_->grid()[static_cast<std::size_t>(j)]) break;
      coord[static_cast<std::size_t>(j)] = 0;
    }
  }
  return f;
}

double DiracOperator::default_eps(double p) { return p < 2.0 ? 1e-8 : 0.0; }

DiracPtr make_dirac(ModelPtr model) {
  return std::make_shared<DiracOperator>(model, build_gamma(model->dim()));
}

}  // namespace pdirac
