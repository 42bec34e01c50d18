#include "pdirac/energy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pdirac {

Nonlinearity Nonlinearity::zero() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::power(double c, double e, double eps_h) {
  if (!(c > 0.0)) throw std::invalid_argument("Nonlinearity::power: c must be > 0");
  if (!(e > 1.0)) throw std::invalid_argument("Nonlinearity::power: e must be > 1");
  Nonlinearity nl;
  nl.kind = Kind::power;
  nl.c = c;
  nl.e = e;
  nl.eps_h = eps_h >= 0.0 ? eps_h : (e < 2.0 ? 1e-8 : 0.0);
  return nl;
}

double Nonlinearity::density(double norm_sq) const {
  if (kind == Kind::zero) return 0.0;
  const double esq = eps_h * eps_h;
  if (esq == 0.0) return norm_sq > 0.0 ? (c / e) * std::pow(norm_sq, 0.5 * e) : 0.0;
  return (c / e) * (std::pow(norm_sq + esq, 0.5 * e) - std::pow(esq, 0.5 * e));
}

double Nonlinearity::prime_factor(double norm_sq) const {
  if (kind == Kind::zero) return 0.0;
  const double shifted = norm_sq + eps_h * eps_h;
  if (shifted == 0.0) return 0.0;
  return c * std::pow(shifted, 0.5 * (e - 2.0));
}

double critical_exponent(double p, int m) {
  if (p >= static_cast<double>(m)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(m) * p / (static_cast<double>(m) - p);
}

Classification classify(const Nonlinearity& nl, double p, int m) {
  Classification cl;
  cl.h4 = true;  // both built-in kinds depend on |psi| only
  if (nl.kind == Nonlinearity::Kind::zero) {
    cl.h1 = true;  // vacuous growth bound
    cl.h3 = true;
    cl.hi = true;
    return cl;
  }
  const double pstar = critical_exponent(p, m);
  if (nl.e > p && nl.e < pstar) {
    cl.h1 = true;
    cl.h2 = true;  // <H_psi, psi> = e H, so mu = e works
    cl.h3 = true;
    cl.q = nl.e;
    cl.mu = nl.e;
  }
  if (nl.e > 1.0 && nl.e < p) {
    cl.hi = true;
    cl.hii = true;  // H >= (c/e)|psi|^e at eps_h = 0; defect O(eps_h^2)
    cl.q = nl.e;
    cl.nu = nl.e;
  }
  return cl;
}

std::string Classification::to_json() const {
  nlohmann::json j;
  j["H1"] = h1;
  j["H2"] = h2;
  j["H3"] = h3;
  j["H4"] = h4;
  j["Hi"] = hi;
  j["Hii"] = hii;
  if (q > 0.0) j["q"] = q;
  if (mu > 0.0) j["mu"] = mu;
  if (nu > 0.0) j["nu"] = nu;
  return j.dump();
}

double hcal(const Nonlinearity& nl, const SpinorField& f) {
  if (nl.kind == Nonlinearity::Kind::zero) return 0.0;
  const int n_spin = f.spinor_dim;
  const std::int64_t sites = f.model->sites();
  double acc = 0.0, carry = 0.0;
  for (std::int64_t s = 0; s < sites; ++s) {
    double nsq = 0.0;
    for (int a = 0; a < n_spin; ++a) nsq += std::norm(f.values[static_cast<std::size_t>(s * n_spin + a)]);
    double x = nl.density(nsq) - carry;
    double t = acc + x;
    carry = (t - acc) - x;
    acc = t;
  }
  return f.model->cell_volume() * acc;
}

SpinorField hcal_prime(const Nonlinearity& nl, const SpinorField& f) {
  SpinorField out(f.model, f.spinor_dim);
  if (nl.kind == Nonlinearity::Kind::zero) return out;
  const int n_spin = f.spinor_dim;
  const std::int64_t sites = f.model->sites();
  for (std::int64_t s = 0; s < sites; ++s) {
    double nsq = 0.0;
    const Complex* v = f.values.data() + s * n_spin;
    for (int a = 0; a < n_spin; ++a) nsq += std::norm(v[a]);
    const double w = nl.prime_factor(nsq);
    Complex* o = out.values.data() + s * n_spin;
    for (int a = 0; a < n_spin; ++a) o[a] = w * v[a];
  }
  return out;
}

Energy::Energy(DiracPtr dirac, double p, Nonlinearity nl, double eps, bool override_p_range)
    : dirac_(std::move(dirac)), p_(p), nl_(nl) {
  if (!(p_ > 1.0)) throw std::invalid_argument("Energy: p must be > 1");
  if (!override_p_range && !(p_ < static_cast<double>(dirac_->model().dim())))
    throw std::invalid_argument(
        "Energy: p must satisfy 1 < p < m (pass override_p_range to relax)");
  eps_ = eps >= 0.0 ? eps : DiracOperator::default_eps(p_);
}

Classification Energy::classification() const {
  return classify(nl_, p_, dirac_->model().dim());
}

double Energy::value(const SpinorField& f) const {
  double s = dirac_->sobolev_norm(f, p_);
  double v = std::pow(s, p_) / p_ - hcal(nl_, f);
  if (!std::isfinite(v)) throw std::runtime_error("Energy::value: non-finite result");
  return v;
}

SpinorField Energy::gradient(const SpinorField& f) const {
  SpinorField g = dirac_->apply_p(f, p_, eps_);
  if (nl_.kind != Nonlinearity::Kind::zero) {
    SpinorField h = hcal_prime(nl_, f);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] -= h.values[i];
  }
  return g;
}

double Energy::residual_norm(const SpinorField& f) const {
  return lp_norm(gradient(f), p_ / (p_ - 1.0));
}

double Energy::nehari_defect(const SpinorField& f) const {
  const double sp = std::pow(dirac_->sobolev_norm(f, p_), p_);
  const double pairing = inner(hcal_prime(nl_, f), f);
  return std::abs(sp - pairing) / std::max(1.0, sp);
}

SpinorField Energy::hessian_apply(const SpinorField& at, const SpinorField& dir) const {
  const int n_spin = at.spinor_dim;
  const std::int64_t sites = at.model->sites();

  // D-part: derivative of g -> (|g|^2 + eps^2)^{(p-2)/2} g at g = D(at),
  // applied to D(dir), pulled back through D.
  SpinorField g = dirac_->apply(at);
  SpinorField dg = dirac_->apply(dir);
  SpinorField density(at.model, n_spin);
  const double esq = eps_ * eps_;
  for (std::int64_t s = 0; s < sites; ++s) {
    const Complex* gv = g.values.data() + s * n_spin;
    const Complex* dv = dg.values.data() + s * n_spin;
    Complex* out = density.values.data() + s * n_spin;
    double nsq = 0.0, re = 0.0;
    for (int a = 0; a < n_spin; ++a) {
      nsq += std::norm(gv[a]);
      re += gv[a].real() * dv[a].real() + gv[a].imag() * dv[a].imag();
    }
    const double shifted = nsq + esq;
    double a_w, b_w;
    if (p_ == 2.0) {
      a_w = 1.0;
      b_w = 0.0;
    } else {
      a_w = std::pow(shifted, 0.5 * (p_ - 2.0));
      b_w = shifted > 0.0 ? (p_ - 2.0) * std::pow(shifted, 0.5 * (p_ - 4.0)) : 0.0;
    }
    for (int a = 0; a < n_spin; ++a) out[a] = a_w * dv[a] + (b_w * re) * gv[a];
  }
  SpinorField result = dirac_->apply(density);

  if (nl_.kind != Nonlinearity::Kind::zero) {
    const double ehsq = nl_.eps_h * nl_.eps_h;
    for (std::int64_t s = 0; s < sites; ++s) {
      const Complex* fv = at.values.data() + s * n_spin;
      const Complex* dv = dir.values.data() + s * n_spin;
      Complex* out = result.values.data() + s * n_spin;
      double nsq = 0.0, re = 0.0;
      for (int a = 0; a < n_spin; ++a) {
        nsq += std::norm(fv[a]);
        re += fv[a].real() * dv[a].real() + fv[a].imag() * dv[a].imag();
      }
      const double shifted = nsq + ehsq;
      const double w = shifted > 0.0 ? nl_.c * std::pow(shifted, 0.5 * (nl_.e - 2.0)) : 0.0;
      const double w2 =
          shifted > 0.0 ? nl_.c * (nl_.e - 2.0) * std::pow(shifted, 0.5 * (nl_.e - 4.0)) : 0.0;
      for (int a = 0; a < n_spin; ++a) out[a] -= w * dv[a] + (w2 * re) * fv[a];
    }
  }
  return result;
}

}  // namespace pdirac
