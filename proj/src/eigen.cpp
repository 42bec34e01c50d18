#include "pdirac/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minimize.hpp"
#include "quotient.hpp"
#include "pdirac/energy.hpp"

namespace pdirac {

namespace {

using detail::deflate;
using detail::power_density;
using detail::project_span;
using detail::QuotientProblem;
using detail::QuotientRun;
using detail::quotient_descent;

void check_p_range(double p, int m, bool override_p_range, const char* who) {
  if (!(p > 1.0)) throw std::invalid_argument(std::string(who) + ": p must be > 1");
  if (!override_p_range && !(p < static_cast<double>(m)))
    throw std::invalid_argument(std::string(who) +
                                ": p must satisfy 1 < p < m (set override_p_range to relax)");
}

}  // namespace

void EigenConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("EigenConfig: tolerance must be > 0");
  if (restarts < 1) throw std::invalid_argument("EigenConfig: restarts must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("EigenConfig: max_iter must be >= 1");
}

double rayleigh(const DiracOperator& dirac, double p, const SpinorField& f) {
  if (!(p >= 1.0)) throw std::invalid_argument("rayleigh: p must be >= 1");
  const double den = lp_norm(f, p);
  if (!(den > 0.0)) throw std::invalid_argument("rayleigh: field must be nonzero");
  return std::pow(dirac.sobolev_norm(f, p) / den, p);
}

EigenPair min_eigen(const DiracOperator& dirac, const EigenConfig& config) {
  config.validate();
  check_p_range(config.p, dirac.model().dim(), config.override_p_range, "min_eigen");
  if (dirac.singular() && !config.override_p_range)
    throw std::invalid_argument(
        "min_eigen: model has the all-zero twist (singular Dirac operator); "
        "set override_p_range to run anyway");

  QuotientProblem prob;
  prob.dirac = &dirac;
  prob.p = config.p;
  prob.q = config.p;
  prob.eps = config.eps >= 0.0 ? config.eps : DiracOperator::default_eps(config.p);

  EigenPair best;
  bool have_best = false;
  for (int restart = 0; restart < config.restarts; ++restart) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(restart);
    Trace trace;
    trace.push_back({0, restart, 'R', 0.0, 0.0, 0.0, 0.0});
    QuotientRun run = quotient_descent(
        prob, random_field(dirac.model_ptr(), dirac.spinor_dim(), seed), config, restart, &trace);

    EigenPair pair;
    pair.lambda = run.lambda;
    pair.field = std::move(run.field);
    pair.residual = run.residual;
    pair.iterations = run.iterations;
    pair.seed = seed;
    pair.accepted = run.accepted;
    pair.trace = std::move(trace);
    if (!pair.accepted)
      pair.message = "restart " + std::to_string(restart) + " did not reach tolerance";

    const bool better =
        !have_best ||
        std::make_tuple(!pair.accepted, pair.lambda, pair.residual, pair.seed) <
            std::make_tuple(!best.accepted, best.lambda, best.residual, best.seed);
    if (better) {
      best = std::move(pair);
      have_best = true;
    }
  }
  if (!best.accepted && best.message.empty())
    best.message = "no restart reached tolerance";
  return best;
}

std::vector<EigenPair> ls_sequence(const DiracOperator& dirac, const EigenConfig& config,
                                   int n) {
  config.validate();
  if (n < 1) throw std::invalid_argument("ls_sequence: n must be >= 1");
  check_p_range(config.p, dirac.model().dim(), config.override_p_range, "ls_sequence");

  const std::size_t basis_size =
      std::min<std::size_t>(2 * static_cast<std::size_t>(n), dirac.eigenfield_count());
  std::vector<SpinorField> span;
  span.reserve(basis_size);
  for (std::size_t i = 0; i < basis_size; ++i) span.push_back(dirac.eigenfield(i));

  QuotientProblem prob;
  prob.dirac = &dirac;
  prob.p = config.p;
  prob.q = config.p;
  prob.eps = config.eps >= 0.0 ? config.eps : DiracOperator::default_eps(config.p);
  prob.span = &span;

  std::vector<SpinorField> found;  // L^2-normalized accepted eigenfields
  prob.deflation = &found;

  std::vector<EigenPair> out;
  for (int i = 0; i < n; ++i) {
    EigenPair best;
    bool have_best = false;
    for (int restart = 0; restart < config.restarts; ++restart) {
      const std::uint64_t seed =
          config.seed + static_cast<std::uint64_t>(i) * 1000 + static_cast<std::uint64_t>(restart);
      Trace trace;
      trace.push_back({0, restart, 'R', 0.0, 0.0, 0.0, 0.0});
      QuotientRun run = quotient_descent(
          prob, random_field(dirac.model_ptr(), dirac.spinor_dim(), seed), config, restart,
          &trace);
      EigenPair pair;
      pair.lambda = run.lambda;
      pair.field = std::move(run.field);
      pair.residual = run.residual;
      pair.iterations = run.iterations;
      pair.seed = seed;
      pair.accepted = run.accepted;
      pair.trace = std::move(trace);
      const bool better =
          !have_best ||
          std::make_tuple(!pair.accepted, pair.lambda, pair.residual, pair.seed) <
              std::make_tuple(!best.accepted, best.lambda, best.residual, best.seed);
      if (better) {
        best = std::move(pair);
        have_best = true;
      }
    }
    if (!best.accepted) {
      best.message = "deflation level " + std::to_string(i) + " did not converge";
      out.push_back(std::move(best));
      break;
    }
    SpinorField unit = best.field;
    double l2 = l2_norm(unit);
    if (l2 > 0.0) {
      scale(unit, Complex{1.0 / l2, 0.0});
      found.push_back(std::move(unit));
    }
    out.push_back(std::move(best));
  }
  std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
    return a.lambda < b.lambda;
  });
  return out;
}

double weak_eigen_check(const DiracOperator& dirac, double p, double lambda,
                        const SpinorField& f, int test_count) {
  const double fn = lp_norm(f, p);
  if (!(fn > 0.0)) throw std::invalid_argument("weak_eigen_check: field must be nonzero");
  SpinorField unit = (1.0 / fn) * f;

  SpinorField lhs_density = power_density(dirac.apply(unit), p, 0.0);
  lhs_density = dirac.apply(lhs_density);  // D(|Du|^{p-2} Du), paired in L^2
  SpinorField rhs_density = power_density(unit, p, 0.0);

  const std::size_t avail = dirac.eigenfield_count();
  double worst = 0.0;
  // The field's own direction is always probed so a wrong lambda cannot
  // hide from a small test set.
  for (int t = -1; t < test_count; ++t) {
    SpinorField phi = (t < 0) ? unit : dirac.eigenfield(static_cast<std::size_t>(t));
    if (t >= 0 && static_cast<std::size_t>(t) >= avail) break;
    const double norm_1p = dirac.sobolev_norm(phi, p);
    if (!(norm_1p > 0.0)) continue;
    scale(phi, Complex{1.0 / norm_1p, 0.0});
    const double defect = std::abs(inner(lhs_density, phi) - lambda * inner(rhs_density, phi));
    worst = std::max(worst, defect);
  }
  return worst;
}

MonotoneResult monotone_inequality_check(const DiracOperator& dirac, double p,
                                         const SpinorField& f, const SpinorField& g) {
  MonotoneResult out;
  SpinorField bf = dirac.apply_p(f, p, 0.0);
  SpinorField bg = dirac.apply_p(g, p, 0.0);
  SpinorField diff_b = bf - bg;
  SpinorField diff = f - g;
  out.lhs = inner(diff_b, diff);
  const double nf = dirac.sobolev_norm(f, p);
  const double ng = dirac.sobolev_norm(g, p);
  out.rhs = (std::pow(nf, p - 1.0) - std::pow(ng, p - 1.0)) * (nf - ng);
  out.holds = out.lhs >= out.rhs - 1e-10;
  return out;
}

TailResult tail_embedding_constant(const DiracOperator& dirac, double p, double q, int k,
                                   const EigenConfig& config) {
  config.validate();
  check_p_range(p, dirac.model().dim(), config.override_p_range, "tail_embedding_constant");
  if (!(q >= 1.0) || !(q < critical_exponent(p, dirac.model().dim())))
    throw std::invalid_argument("tail_embedding_constant: need 1 <= q < p*");
  if (k < 0) throw std::invalid_argument("tail_embedding_constant: k must be >= 0");
  if (static_cast<std::size_t>(k) >= dirac.eigenfield_count())
    throw std::invalid_argument("tail_embedding_constant: k exceeds the discrete basis");

  std::vector<SpinorField> head;
  head.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) head.push_back(dirac.eigenfield(static_cast<std::size_t>(i)));

  QuotientProblem prob;
  prob.dirac = &dirac;
  prob.p = p;
  prob.q = q;
  // The density |u|^{q-2} u is singular near zeros of u for q < 2, so the
  // regularization keys off both exponents here.
  prob.eps = config.eps >= 0.0 ? config.eps
                               : std::max(DiracOperator::default_eps(p),
                                          DiracOperator::default_eps(q));
  prob.deflation = &head;

  TailResult best;
  bool have_best = false;
  // Restart 0 starts at the first eigenfield past the deflated head: a
  // unimodular exact critical point of the quotient and the minimizer in
  // the pivot case, so the estimate can only improve on it.
  for (int restart = 0; restart < config.restarts; ++restart) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(restart);
    SpinorField start = restart == 0
                            ? dirac.eigenfield(static_cast<std::size_t>(k))
                            : random_field(dirac.model_ptr(), dirac.spinor_dim(), seed);
    QuotientRun run = quotient_descent(prob, std::move(start), config, restart, nullptr);
    TailResult cand;
    cand.tau = std::pow(run.lambda, 1.0 / p);
    cand.residual = run.residual;
    cand.iterations = run.iterations;
    cand.accepted = run.accepted;
    const bool better = !have_best ||
                        std::make_tuple(!cand.accepted, cand.tau, cand.residual) <
                            std::make_tuple(!best.accepted, best.tau, best.residual);
    if (better) {
      best = cand;
      have_best = true;
    }
  }
  if (!best.accepted) best.message = "tail minimization did not reach tolerance";
  return best;
}

}  // namespace pdirac
