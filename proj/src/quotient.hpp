#ifndef PDIRAC_SRC_QUOTIENT_HPP
#define PDIRAC_SRC_QUOTIENT_HPP

#include <cmath>

#include "minimize.hpp"
#include "pdirac/dirac.hpp"
#include "pdirac/eigen.hpp"

namespace pdirac::detail {

/// |f|^{q-2} f with the same shifted regularization as the p-Dirac scaling.
inline SpinorField power_density(const SpinorField& f, double q, double eps) {
  SpinorField out = f;
  const int n_spin = f.spinor_dim;
  const std::int64_t sites = f.model->sites();
  const double esq = eps * eps;
  for (std::int64_t s = 0; s < sites; ++s) {
    Complex* v = out.values.data() + s * n_spin;
    double nsq = 0.0;
    for (int a = 0; a < n_spin; ++a) nsq += std::norm(v[a]);
    const double shifted = nsq + esq;
    const double w = (q == 2.0 || shifted == 0.0) ? (q == 2.0 ? 1.0 : 0.0)
                                                  : std::pow(shifted, 0.5 * (q - 2.0));
    for (int a = 0; a < n_spin; ++a) v[a] *= w;
  }
  return out;
}

/// Minimization of ||Df||_p^p / ||f||_q^p over the unit L^q sphere,
/// optionally restricted to a span and deflated against found directions.
struct QuotientProblem {
  const DiracOperator* dirac = nullptr;
  double p = 2.0;
  double q = 2.0;
  double eps = 0.0;
  const std::vector<SpinorField>* deflation = nullptr;  // L^2-orthonormal
  const std::vector<SpinorField>* span = nullptr;       // restrict to this span

  void constrain(SpinorField& f) const {
    if (span) f = project_span(f, *span);
    if (deflation) deflate(f, *deflation);
  }

  double value(const SpinorField& f) const {
    return std::pow(dirac->sobolev_norm(f, p), p) / std::pow(lp_norm(f, q), p);
  }

  SpinorField residual(const SpinorField& f, double lambda) const {
    SpinorField r = dirac->apply_p(f, p, eps);
    SpinorField jq = power_density(f, q, eps);
    add_scaled(r, Complex{-lambda, 0.0}, jq);
    if (span) r = project_span(r, *span);
    if (deflation) deflate(r, *deflation);
    return r;
  }
};

struct QuotientRun {
  double lambda = 0.0;
  SpinorField field;
  double residual = 0.0;
  int iterations = 0;
  bool accepted = false;
};

/// Projected descent over the unit L^q sphere, Armijo backtracking with a
/// Barzilai-Borwein warm start for the trial step.
inline QuotientRun quotient_descent(const QuotientProblem& prob, SpinorField start,
                                    const EigenConfig& cfg, int restart_index, Trace* trace) {
  QuotientRun run;
  const double dual = prob.p / (prob.p - 1.0);

  prob.constrain(start);
  double qn = lp_norm(start, prob.q);
  if (!(qn > 0.0)) return run;
  scale(start, Complex{1.0 / qn, 0.0});

  SpinorField f = std::move(start);
  double lambda = prob.value(f);
  SpinorField r = prob.residual(f, lambda);
  double step = 1.0 / std::max(1.0, lambda);
  SpinorField prev_f, prev_r;
  bool have_prev = false;

  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    const double res_norm = lp_norm(r, dual);
    if (trace)
      trace->push_back({it, restart_index, 'd', lambda, res_norm,
                        prob.dirac->sobolev_norm(f, prob.p), step});
    if (res_norm <= cfg.tolerance) {
      run.accepted = true;
      break;
    }

    double gsq = inner(r, r);
    if (!(gsq > 0.0)) break;

    double alpha;
    if (have_prev) {
      SpinorField df = f - prev_f;
      SpinorField dr = r - prev_r;
      alpha = bb_step(inner(df, df), inner(df, dr), cfg.grow * step);
    } else {
      alpha = cfg.grow * step;
    }

    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      SpinorField trial = f;
      add_scaled(trial, Complex{-alpha, 0.0}, r);
      prob.constrain(trial);
      double tn = lp_norm(trial, prob.q);
      if (tn > 0.0) {
        scale(trial, Complex{1.0 / tn, 0.0});
        double lt = prob.value(trial);
        if (lt <= lambda - cfg.armijo * alpha * gsq) {
          prev_f = std::move(f);
          prev_r = std::move(r);
          have_prev = true;
          f = std::move(trial);
          lambda = lt;
          r = prob.residual(f, lambda);
          step = alpha;
          moved = true;
          break;
        }
      }
      alpha *= cfg.shrink;
    }
    if (!moved) break;
  }
  run.lambda = lambda;
  run.field = std::move(f);
  run.residual = lp_norm(prob.residual(run.field, lambda), dual);
  run.iterations = it;
  if (run.residual <= cfg.tolerance) run.accepted = true;
  return run;
}

}  // namespace pdirac::detail

#endif
