#include "pdirac/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "minimize.hpp"
#include "quotient.hpp"

namespace pdirac {

namespace {

using detail::golden_max;
using detail::golden_min;
using detail::project_span;

SpinorField maybe_project(SpinorField f, const std::vector<SpinorField>* span) {
  if (span) return project_span(f, *span);
  return f;
}

/// Line-search probe: overflow past the floating range counts as +inf so
/// Armijo rejects the trial instead of aborting the solve.
double safe_value(const Energy& energy, const SpinorField& f) {
  try {
    return energy.value(f);
  } catch (const std::exception&) {
    return std::numeric_limits<double>::infinity();
  }
}

SpinorField projected_gradient(const Energy& energy, const SpinorField& f,
                               const std::vector<SpinorField>* span) {
  SpinorField g = energy.gradient(f);
  if (span) g = project_span(g, *span);
  return g;
}

double dual_norm(const Energy& energy, const SpinorField& g) {
  return lp_norm(g, energy.p() / (energy.p() - 1.0));
}

struct DescentRun {
  SpinorField field;
  double value = 0.0;
  double residual = 0.0;
  int evals = 0;
  bool accepted = false;
};

/// Armijo + Barzilai-Borwein descent on the functional itself, optionally
/// restricted to a Galerkin span.
DescentRun descent_minimize(const Energy& energy, SpinorField start, const SolveConfig& cfg,
                            int budget, const std::vector<SpinorField>* span, int restart,
                            Trace* trace) {
  DescentRun run;
  SpinorField f = maybe_project(std::move(start), span);
  double val = energy.value(f);
  SpinorField g = projected_gradient(energy, f, span);
  int evals = 1;
  double step = 1e-2;
  SpinorField prev_f, prev_g;
  bool have_prev = false;

  while (evals < budget) {
    const double res = dual_norm(energy, g);
    if (trace)
      trace->push_back({evals, restart, 'd', val, res,
                        energy.dirac().sobolev_norm(f, energy.p()), step});
    if (res <= cfg.tol) {
      run.accepted = true;
      break;
    }
    const double gsq = inner(g, g);
    if (!(gsq > 0.0)) break;

    double alpha = cfg.grow * step;
    if (have_prev) {
      SpinorField df = f - prev_f;
      SpinorField dg = g - prev_g;
      alpha = detail::bb_step(inner(df, df), inner(df, dg), alpha);
    }

    bool moved = false;
    for (int bt = 0; bt < 60 && evals < budget; ++bt) {
      SpinorField trial = f;
      add_scaled(trial, Complex{-alpha, 0.0}, g);
      const double tv = safe_value(energy, trial);
      if (tv <= val - cfg.armijo * alpha * gsq) {
        prev_f = std::move(f);
        prev_g = std::move(g);
        have_prev = true;
        f = std::move(trial);
        val = tv;
        g = projected_gradient(energy, f, span);
        ++evals;
        step = alpha;
        moved = true;
        break;
      }
      alpha *= cfg.shrink;
    }
    if (!moved) break;
  }
  run.field = std::move(f);
  run.value = val;
  run.residual = dual_norm(energy, projected_gradient(energy, run.field, span));
  run.evals = evals;
  if (run.residual <= cfg.tol) run.accepted = true;
  return run;
}

/// Residual polishing: descend Phi = 1/2 ||grad L||_2^2 with
/// Hessian-vector products. Converges to the nearby critical point from a
/// good starting guess regardless of its Morse index.
DescentRun polish_residual(const Energy& energy, SpinorField start, const SolveConfig& cfg,
                           int budget, const std::vector<SpinorField>* span, Trace* trace) {
  DescentRun run;
  SpinorField f = std::move(start);
  SpinorField g = projected_gradient(energy, f, span);
  double phi = 0.5 * inner(g, g);
  int evals = 1;
  double step = 1e-4;
  SpinorField prev_f, prev_d;
  bool have_prev = false;

  while (evals < budget) {
    const double res = dual_norm(energy, g);
    if (trace)
      trace->push_back({evals, 0, 'x', safe_value(energy, f), res,
                        energy.dirac().sobolev_norm(f, energy.p()), step});
    if (res <= cfg.tol) {
      run.accepted = true;
      break;
    }
    SpinorField d = energy.hessian_apply(f, g);  // grad Phi
    if (span) d = project_span(d, *span);
    ++evals;
    const double dsq = inner(d, d);
    if (!(dsq > 0.0)) break;

    double alpha = cfg.grow * step;
    if (have_prev) {
      SpinorField df = f - prev_f;
      SpinorField dd = d - prev_d;
      alpha = detail::bb_step(inner(df, df), inner(df, dd), alpha);
    }

    bool moved = false;
    for (int bt = 0; bt < 60 && evals < budget; ++bt) {
      SpinorField trial = f;
      add_scaled(trial, Complex{-alpha, 0.0}, d);
      SpinorField gt = projected_gradient(energy, trial, span);
      ++evals;
      const double phit = 0.5 * inner(gt, gt);
      if (phit <= phi - cfg.armijo * alpha * dsq) {
        prev_f = std::move(f);
        prev_d = std::move(d);
        have_prev = true;
        f = std::move(trial);
        g = std::move(gt);
        phi = phit;
        step = alpha;
        moved = true;
        break;
      }
      alpha *= cfg.shrink;
    }
    if (!moved) break;
  }
  run.field = std::move(f);
  run.value = energy.value(run.field);
  run.residual = dual_norm(energy, g);
  run.evals = evals;
  if (run.residual <= cfg.tol) run.accepted = true;
  return run;
}

SpinorField interpolate(const SpinorField& a, const SpinorField& b, double t) {
  SpinorField out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] += t * (b.values[i] - a.values[i]);
  return out;
}

double l2_dist(const SpinorField& a, const SpinorField& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(acc * a.model->cell_volume());
}

/// Equal-arclength resampling of the polyline, endpoints fixed.
void resample_path(std::vector<SpinorField>& nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + l2_dist(nodes[i - 1], nodes[i]);
  if (!(cum.back() > 0.0)) return;
  std::vector<SpinorField> fresh;
  fresh.reserve(n);
  fresh.push_back(nodes.front());
  std::size_t seg = 1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double target = cum.back() * static_cast<double>(i) / static_cast<double>(n - 1);
    while (seg + 1 < n && cum[seg] < target) ++seg;
    const double lo = cum[seg - 1], hi = cum[seg];
    const double t = hi > lo ? (target - lo) / (hi - lo) : 0.0;
    fresh.push_back(interpolate(nodes[seg - 1], nodes[seg], t));
  }
  fresh.push_back(nodes.back());
  nodes = std::move(fresh);
}

CriticalPoint failure_point(const Energy& energy, SpinorField f, PointKind kind, int k,
                            std::uint64_t seed, int evals, std::string message, Trace trace) {
  CriticalPoint out;
  out.value = energy.value(f);
  out.grad_residual = energy.residual_norm(f);
  out.nehari = energy.nehari_defect(f);
  out.field = std::move(f);
  out.kind = kind;
  out.k = k;
  out.iterations = evals;
  out.seed = seed;
  out.accepted = false;
  out.message = std::move(message);
  out.trace = std::move(trace);
  return out;
}

CriticalPoint mountain_pass_impl(const Energy& energy, const SolveConfig& cfg,
                                 std::optional<SpinorField> direction,
                                 const std::vector<SpinorField>* span, PointKind kind, int k) {
  cfg.validate();
  const Classification cl = energy.classification();
  if (!cl.superlinear())
    throw std::invalid_argument("mountain_pass: nonlinearity is not superlinearly classified");

  Trace trace;
  const double rho = rim_estimate(energy, cfg.rim_radius, cfg.rim_samples, cfg.seed, span);
  if (!(rho > 0.0)) {
    SpinorField zero(energy.dirac().model_ptr(), energy.dirac().spinor_dim());
    return failure_point(energy, std::move(zero), kind, k, cfg.seed, 0,
                         "rim estimate is not positive", std::move(trace));
  }

  SpinorField dir = direction ? std::move(*direction)
                    : span    ? span->back()
                              : random_field(energy.dirac().model_ptr(),
                                             energy.dirac().spinor_dim(), cfg.seed);
  dir = maybe_project(std::move(dir), span);
  SpinorField e = find_e(energy, dir, cfg.rim_radius, &trace);

  const int points = cfg.path_points;
  std::vector<SpinorField> nodes;
  nodes.reserve(static_cast<std::size_t>(points));
  std::vector<double> vals(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    nodes.push_back(interpolate(SpinorField(energy.dirac().model_ptr(), e.spinor_dim), e,
                                static_cast<double>(i) / (points - 1)));
    vals[static_cast<std::size_t>(i)] = safe_value(energy, nodes.back());
  }

  std::vector<double> node_step(static_cast<std::size_t>(points), 1e-2);
  int evals = 0;
  int stagnant = 0;
  double last_max = std::numeric_limits<double>::infinity();
  int round = 0;

  // The power family admits an exact ray reduction of the pass (below);
  // when it applies, most of the budget is reserved for that stage.
  const Nonlinearity& nl = energy.nonlinearity();
  const bool ray_reduction =
      nl.kind == Nonlinearity::Kind::power && nl.e > energy.p() && span == nullptr;
  const int path_budget = ray_reduction ? cfg.max_iter / 4 : cfg.max_iter;

  // The functional is unbounded below beyond the ridge; nodes that have
  // fallen this deep are parked, and every move is displacement-capped so
  // the path cannot race toward infinity.
  double init_max = 0.0;
  for (double v : vals) init_max = std::max(init_max, std::abs(v));
  const double value_floor = -10.0 * (1.0 + init_max);
  double arc = l2_dist(nodes.front(), nodes.back());

  auto refine_max = [&](int idx) {
    // 1-D maximization along the two adjacent segments keeps the node on
    // the exact path crest (and lands exactly on invariant-ray saddles).
    if (idx <= 0 || idx >= points - 1) return;
    const SpinorField& a = nodes[static_cast<std::size_t>(idx - 1)];
    const SpinorField& b = nodes[static_cast<std::size_t>(idx)];
    const SpinorField& c = nodes[static_cast<std::size_t>(idx + 1)];
    double t1 = golden_max([&](double t) { return safe_value(energy, interpolate(a, b, t)); },
                           0.0, 1.0, 60);
    double t2 = golden_max([&](double t) { return safe_value(energy, interpolate(b, c, t)); },
                           0.0, 1.0, 60);
    SpinorField cand1 = interpolate(a, b, t1);
    SpinorField cand2 = interpolate(b, c, t2);
    double v1 = safe_value(energy, cand1), v2 = safe_value(energy, cand2);
    if (v1 >= vals[static_cast<std::size_t>(idx)] || v2 >= vals[static_cast<std::size_t>(idx)]) {
      if (v1 >= v2) {
        nodes[static_cast<std::size_t>(idx)] = std::move(cand1);
        vals[static_cast<std::size_t>(idx)] = v1;
      } else {
        nodes[static_cast<std::size_t>(idx)] = std::move(cand2);
        vals[static_cast<std::size_t>(idx)] = v2;
      }
    }
  };

  SpinorField best = nodes[static_cast<std::size_t>(points / 2)];
  double best_res = std::numeric_limits<double>::infinity();

  auto relax_node = [&](int i) {
    if (vals[static_cast<std::size_t>(i)] < value_floor) return;
    SpinorField gi = projected_gradient(energy, nodes[static_cast<std::size_t>(i)], span);
    ++evals;
    const double gisq = inner(gi, gi);
    if (!(gisq > 0.0)) return;
    double alpha = std::min(cfg.grow * node_step[static_cast<std::size_t>(i)],
                            2.0 * arc / (static_cast<double>(points) * std::sqrt(gisq)));
    for (int bt = 0; bt < 20; ++bt) {
      SpinorField trial = nodes[static_cast<std::size_t>(i)];
      add_scaled(trial, Complex{-alpha, 0.0}, gi);
      const double tv = safe_value(energy, trial);
      if (tv <= vals[static_cast<std::size_t>(i)] - cfg.armijo * alpha * gisq) {
        nodes[static_cast<std::size_t>(i)] = std::move(trial);
        vals[static_cast<std::size_t>(i)] = tv;
        node_step[static_cast<std::size_t>(i)] = alpha;
        break;
      }
      alpha *= cfg.shrink;
    }
  };

  bool converged = false;
  while (evals < path_budget && !converged) {
    ++round;
    int imax = 1;
    for (int i = 1; i + 1 < points; ++i)
      if (vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(imax)]) imax = i;
    refine_max(imax);

    // Several crest moves per round: the maximum node carries the whole
    // search, its neighbours only shape the tangent.
    for (int sub = 0; sub < 4 && evals < cfg.max_iter; ++sub) {
      SpinorField& z = nodes[static_cast<std::size_t>(imax)];
      SpinorField g = projected_gradient(energy, z, span);
      ++evals;
      const double res = dual_norm(energy, g);
      if (sub == 0)
        trace.push_back({evals, 0, 'm', vals[static_cast<std::size_t>(imax)], res,
                         energy.dirac().sobolev_norm(z, energy.p()),
                         node_step[static_cast<std::size_t>(imax)]});
      if (res < best_res) {
        best = z;
        best_res = res;
      }
      if (res <= cfg.tol) {
        converged = true;
        break;
      }

      // Transverse component only: descending along the path would merely
      // slide the maximum onto a neighbouring node.
      SpinorField tangent = nodes[static_cast<std::size_t>(imax + 1)] -
                            nodes[static_cast<std::size_t>(imax - 1)];
      const double tn = std::sqrt(inner(tangent, tangent));
      SpinorField d = g;
      if (tn > 0.0) {
        scale(tangent, Complex{1.0 / tn, 0.0});
        add_scaled(d, Complex{-inner(g, tangent), 0.0}, tangent);
      }
      const double dsq = inner(d, d);
      const double gsq = inner(g, g);
      if (!(dsq > 0.0025 * gsq) || !(gsq > 0.0)) break;  // crest is ray-like here
      double alpha = std::min(cfg.grow * node_step[static_cast<std::size_t>(imax)],
                              0.25 * arc / std::sqrt(dsq));
      bool moved = false;
      for (int bt = 0; bt < 40 && evals < cfg.max_iter; ++bt) {
        SpinorField trial = z;
        add_scaled(trial, Complex{-alpha, 0.0}, d);
        const double tv = safe_value(energy, trial);
        if (tv <= vals[static_cast<std::size_t>(imax)] - cfg.armijo * alpha * dsq) {
          z = std::move(trial);
          vals[static_cast<std::size_t>(imax)] = tv;
          node_step[static_cast<std::size_t>(imax)] = alpha;
          moved = true;
          break;
        }
        alpha *= cfg.shrink;
      }
      if (!moved) break;
    }
    if (converged) break;

    // Neighbourhood relaxation every round, full-path relaxation
    // periodically; both pull the path off the ridge.
    for (int i = std::max(1, imax - 4); i <= std::min(points - 2, imax + 4); ++i) {
      if (i == imax || evals >= cfg.max_iter) break;
      relax_node(i);
    }
    if (round % 3 == 0) {
      for (int i = 1; i + 1 < points && evals < cfg.max_iter; ++i) {
        if (i != imax) relax_node(i);
      }
    }

    if (round % 10 == 0) {
      resample_path(nodes);
      arc = 0.0;
      for (int i = 1; i < points; ++i)
        arc += l2_dist(nodes[static_cast<std::size_t>(i - 1)], nodes[static_cast<std::size_t>(i)]);
      for (int i = 0; i < points; ++i)
        vals[static_cast<std::size_t>(i)] = safe_value(energy, nodes[static_cast<std::size_t>(i)]);
    }

    const double cur_max = vals[static_cast<std::size_t>(imax)];
    if (last_max - cur_max < 1e-14) {
      if (++stagnant >= 100) break;
    } else {
      stagnant = 0;
    }
    last_max = cur_max;
  }

  if (best_res > cfg.tol && evals < cfg.max_iter && ray_reduction) {
    // Exact pass reduction for H = (c/e)|psi|^e: along every ray the level
    // max_t L(t psi) is a scale-invariant quotient of ||D psi||_p and
    // ||psi||_e, so descending that quotient from the crest and rescaling
    // the minimizer onto <dL(t u), t u> = 0 lands on a critical point at
    // the pass level.
    detail::QuotientProblem qp;
    qp.dirac = &energy.dirac();
    qp.p = energy.p();
    qp.q = nl.e;
    qp.eps = energy.eps();
    EigenConfig qc;
    qc.p = energy.p();
    qc.armijo = cfg.armijo;
    qc.grow = cfg.grow;
    qc.shrink = cfg.shrink;
    qc.tolerance = 1e-2 * cfg.tol;
    SpinorField start = best;
    for (int attempt = 0; attempt < 3 && evals < cfg.max_iter; ++attempt) {
      qc.max_iter = cfg.max_iter - evals;
      detail::QuotientRun run = quotient_descent(qp, std::move(start), qc, attempt, &trace);
      evals += run.iterations;
      if (!(run.lambda > 0.0)) break;
      const double t = std::pow(run.lambda / nl.c, 1.0 / (nl.e - energy.p()));
      SpinorField cand = t * run.field;
      const double res = dual_norm(energy, projected_gradient(energy, cand, span));
      ++evals;
      if (res < best_res) {
        best = std::move(cand);
        best_res = res;
      }
      start = run.field;
      if (best_res <= cfg.tol) break;
      qc.tolerance *= 0.5 * std::max(cfg.tol / res, 1e-6);
    }
  }

  if (best_res > cfg.tol && evals < cfg.max_iter) {
    DescentRun polished =
        polish_residual(energy, best, cfg, cfg.max_iter - evals, span, &trace);
    evals += polished.evals;
    if (polished.residual < best_res) {
      best = std::move(polished.field);
      best_res = polished.residual;
    }
  }

  CriticalPoint out;
  out.value = energy.value(best);
  out.grad_residual = best_res;
  out.nehari = energy.nehari_defect(best);
  out.field = std::move(best);
  out.kind = kind;
  out.k = k;
  out.iterations = evals;
  out.seed = cfg.seed;
  out.accepted = best_res <= cfg.tol && out.value > 0.0 && out.nehari <= 1e-6;
  if (!out.accepted) {
    out.message = best_res > cfg.tol
                      ? (stagnant >= 100 ? "stagnated before reaching tolerance"
                                         : "iteration budget exhausted")
                      : "converged to a nonpositive level or a pairing defect";
  }
  out.trace = std::move(trace);
  return out;
}

}  // namespace

void SolveConfig::validate() const {
  if (path_points < 8) throw std::invalid_argument("SolveConfig: path_points must be >= 8");
  if (!(tol > 0.0)) throw std::invalid_argument("SolveConfig: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("SolveConfig: max_iter must be >= 1");
}

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::mountain_pass: return "mountain_pass";
    case PointKind::minimizer: return "minimizer";
    case PointKind::fountain: return "fountain";
    case PointKind::dual_fountain: return "dual_fountain";
    case PointKind::constant_branch: return "constant_branch";
  }
  return "unknown";
}

double rim_estimate(const Energy& energy, double r, int samples, std::uint64_t seed,
                    const std::vector<SpinorField>* subspace) {
  if (r < 0.0) throw std::invalid_argument("rim_estimate: r must be >= 0");
  if (samples < 1) throw std::invalid_argument("rim_estimate: samples must be >= 1");
  double inf = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    SpinorField f = random_field(energy.dirac().model_ptr(), energy.dirac().spinor_dim(),
                                 seed + static_cast<std::uint64_t>(s));
    f = maybe_project(std::move(f), subspace);
    const double n = energy.dirac().sobolev_norm(f, energy.p());
    scale(f, Complex{n > 0.0 ? r / n : 0.0, 0.0});
    inf = std::min(inf, energy.value(f));
  }
  return inf;
}

SpinorField constant_branch(const Energy& energy) {
  const Nonlinearity& nl = energy.nonlinearity();
  if (nl.kind != Nonlinearity::Kind::power)
    throw std::invalid_argument("constant_branch: requires the power nonlinearity");
  if (nl.e == energy.p())
    throw std::invalid_argument("constant_branch: requires e != p");
  const double s = energy.dirac().min_momentum();
  if (!(s > 0.0))
    throw std::invalid_argument("constant_branch: model must be invertible");
  const double amplitude =
      std::pow(std::pow(s, energy.p()) / nl.c, 1.0 / (nl.e - energy.p()));
  SpinorField f(energy.dirac().model_ptr(), energy.dirac().spinor_dim());
  const std::int64_t sites = f.model->sites();
  for (std::int64_t site = 0; site < sites; ++site)
    f.values[static_cast<std::size_t>(site * f.spinor_dim)] = amplitude;
  return f;
}

CriticalPoint constant_branch_point(const Energy& energy) {
  CriticalPoint out;
  out.field = constant_branch(energy);
  out.value = energy.value(out.field);
  out.grad_residual = energy.residual_norm(out.field);
  out.nehari = energy.nehari_defect(out.field);
  out.kind = PointKind::constant_branch;
  out.accepted = true;
  return out;
}

SpinorField find_e(const Energy& energy, const SpinorField& direction, double r, Trace* trace) {
  const Classification cl = energy.classification();
  if (!cl.superlinear())
    throw std::invalid_argument("find_e: nonlinearity is not superlinearly classified");
  const double dn = energy.dirac().sobolev_norm(direction, energy.p());
  if (!(dn > 0.0)) throw std::invalid_argument("find_e: direction must be nonzero");
  double t = 1.0;
  for (int i = 0; i < 60; ++i) {
    SpinorField cand = t * direction;
    const double v = energy.value(cand);
    if (trace) trace->push_back({i, 0, 'e', v, 0.0, t * dn, t});
    if (v <= 0.0 && t * dn > r) return cand;
    t *= 2.0;
  }
  throw std::runtime_error(
      "find_e: no nonpositive level after 60 doublings (nonlinearity misclassified?)");
}

CriticalPoint mountain_pass(const Energy& energy, const SolveConfig& config,
                            std::optional<SpinorField> initial_direction,
                            const std::vector<SpinorField>* subspace) {
  return mountain_pass_impl(energy, config, std::move(initial_direction), subspace,
                            PointKind::mountain_pass, 0);
}

CriticalPoint global_minimize(const Energy& energy, const SolveConfig& config) {
  config.validate();
  const Classification cl = energy.classification();
  if (!cl.sublinear())
    throw std::invalid_argument("global_minimize: nonlinearity is not sublinearly classified");

  struct Start {
    SpinorField field;
    bool branch;
    std::uint64_t seed;
  };
  std::vector<Start> starts;
  if (energy.nonlinearity().kind == Nonlinearity::Kind::power &&
      energy.nonlinearity().e != energy.p() && !energy.dirac().singular())
    starts.push_back({constant_branch(energy), true, config.seed});
  for (int i = 0; i < config.restarts; ++i) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
    starts.push_back(
        {random_field(energy.dirac().model_ptr(), energy.dirac().spinor_dim(), seed), false,
         seed});
  }

  CriticalPoint best;
  bool have_best = false;
  const int budget = std::max(1, config.max_iter / static_cast<int>(starts.size()));
  for (std::size_t i = 0; i < starts.size(); ++i) {
    Trace trace;
    trace.push_back({0, static_cast<int>(i), 'R', 0.0, 0.0, 0.0, 0.0});
    DescentRun run =
        descent_minimize(energy, std::move(starts[i].field), config, budget, nullptr,
                         static_cast<int>(i), &trace);
    CriticalPoint cand;
    cand.value = run.value;
    cand.grad_residual = run.residual;
    cand.nehari = energy.nehari_defect(run.field);
    cand.field = std::move(run.field);
    cand.kind = starts[i].branch ? PointKind::constant_branch : PointKind::minimizer;
    cand.iterations = run.evals;
    cand.seed = starts[i].seed;
    cand.accepted = run.accepted && cand.nehari <= 1e-6;
    cand.trace = std::move(trace);
    const bool better =
        !have_best || std::make_tuple(!cand.accepted, cand.value, cand.grad_residual) <
                          std::make_tuple(!best.accepted, best.value, best.grad_residual);
    if (better) {
      best = std::move(cand);
      have_best = true;
    }
  }
  if (!best.accepted) best.message = "no start reached tolerance";
  return best;
}

std::vector<CriticalPoint> fountain_sequence(const Energy& energy, const SolveConfig& config,
                                             int kmax) {
  config.validate();
  if (kmax < 1) throw std::invalid_argument("fountain_sequence: kmax must be >= 1");
  const Classification cl = energy.classification();
  if (!(cl.superlinear() && cl.h4))
    throw std::invalid_argument("fountain_sequence: requires the even superlinear class");

  std::vector<CriticalPoint> out;
  std::vector<SpinorField> span;
  for (int k = 1; k <= kmax; ++k) {
    const std::size_t want = 2 * static_cast<std::size_t>(k);
    if (want > energy.dirac().eigenfield_count()) {
      SpinorField zero(energy.dirac().model_ptr(), energy.dirac().spinor_dim());
      out.push_back(failure_point(energy, std::move(zero), PointKind::fountain, k, config.seed,
                                  0, "subspace exceeds the discrete basis", {}));
      continue;
    }
    while (span.size() < want) span.push_back(energy.dirac().eigenfield(span.size()));
    CriticalPoint point =
        mountain_pass_impl(energy, config, std::nullopt, &span, PointKind::fountain, k);
    point.k = k;
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<CriticalPoint> dual_fountain_sequence(const Energy& energy,
                                                  const SolveConfig& config, int kmax) {
  config.validate();
  if (kmax < 1) throw std::invalid_argument("dual_fountain_sequence: kmax must be >= 1");
  const Classification cl = energy.classification();
  if (!(cl.sublinear() && cl.hii && cl.h4))
    throw std::invalid_argument("dual_fountain_sequence: requires the even sublinear class");

  // Levels deepen past kmax until kmax distinct negative critical values
  // are in hand; each level works on the newest eigen-direction of its
  // Galerkin subspace, where the sublinear well is found by a 1-D line
  // search before projected descent.
  const int level_cap = 8 * kmax;
  std::vector<CriticalPoint> found;
  std::vector<double> distinct;
  std::vector<SpinorField> span;
  for (int level = 1; level <= level_cap; ++level) {
    if (static_cast<int>(distinct.size()) >= kmax) break;
    const std::size_t want = 2 * static_cast<std::size_t>(level);
    if (want > energy.dirac().eigenfield_count()) break;
    while (span.size() < want) span.push_back(energy.dirac().eigenfield(span.size()));
    const SpinorField& direction = span.back();

    auto along = [&](double t) { return safe_value(energy, t * direction); };
    double t_hi = 1.0;
    for (int i = 0; i < 60 && along(2.0 * t_hi) < along(t_hi); ++i) t_hi *= 2.0;
    const double t_star = golden_min(along, 0.0, 2.0 * t_hi, 80);
    if (!(along(t_star) < 0.0)) continue;  // no negative well along this ray

    Trace trace;
    DescentRun run = descent_minimize(energy, t_star * direction, config, config.max_iter,
                                      &span, level, &trace);
    if (!(run.accepted && run.value < 0.0)) continue;
    const double pairing_defect = energy.nehari_defect(run.field);
    if (!(pairing_defect <= 1e-6)) continue;

    bool fresh = true;
    for (double v : distinct)
      if (std::abs(run.value - v) <= 1e-6 * std::max(1e-12, std::abs(v))) fresh = false;
    if (!fresh) continue;
    distinct.push_back(run.value);

    CriticalPoint point;
    point.value = run.value;
    point.grad_residual = run.residual;
    point.nehari = pairing_defect;
    point.field = std::move(run.field);
    point.kind = PointKind::dual_fountain;
    point.iterations = run.evals;
    point.seed = config.seed;
    point.accepted = true;
    point.message = "level " + std::to_string(level);
    point.trace = std::move(trace);
    found.push_back(std::move(point));
  }

  std::stable_sort(found.begin(), found.end(),
                   [](const CriticalPoint& a, const CriticalPoint& b) { return a.value < b.value; });
  std::vector<CriticalPoint> out;
  for (int k = 1; k <= kmax; ++k) {
    if (static_cast<std::size_t>(k - 1) < found.size()) {
      out.push_back(std::move(found[static_cast<std::size_t>(k - 1)]));
      out.back().k = k;
    } else {
      SpinorField zero(energy.dirac().model_ptr(), energy.dirac().spinor_dim());
      out.push_back(failure_point(energy, std::move(zero), PointKind::dual_fountain, k,
                                  config.seed, 0,
                                  "fewer distinct negative critical values than requested", {}));
    }
  }
  return out;
}

TrendReport fountain_trend(const std::vector<CriticalPoint>& points) {
  TrendReport rep;
  if (points.empty()) {
    rep.message = "empty sweep";
    return rep;
  }
  for (const CriticalPoint& p : points) {
    if (!p.accepted || !(p.value > 0.0)) {
      rep.message = "level " + std::to_string(p.k) + " not accepted at a positive level";
      return rep;
    }
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].value < points[i - 1].value - 1e-8) {
      rep.message = "sequence decreases at step " + std::to_string(i);
      return rep;
    }
  }
  // Plateaus from eigenvalue multiplicity are legitimate; growth must show
  // across every half-sweep stride.
  const std::size_t stride = (points.size() + 1) / 2;
  for (std::size_t i = 0; i + stride < points.size(); ++i) {
    if (!(points[i + stride].value > points[i].value + 1e-8)) {
      rep.message = "no strict growth across stride at index " + std::to_string(i);
      return rep;
    }
  }
  rep.ok = true;
  rep.message = "nondecreasing with strict growth across stride " + std::to_string(stride);
  return rep;
}

TrendReport dual_fountain_trend(const std::vector<CriticalPoint>& points) {
  TrendReport rep;
  if (points.empty()) {
    rep.message = "empty sweep";
    return rep;
  }
  for (const CriticalPoint& p : points) {
    if (!p.accepted || !(p.value < 0.0)) {
      rep.message = "entry " + std::to_string(p.k) + " not accepted at a negative level";
      return rep;
    }
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].value < points[i - 1].value - 1e-12) {
      rep.message = "sequence decreases at step " + std::to_string(i);
      return rep;
    }
  }
  rep.ok = true;
  rep.message = "negative and nondecreasing toward zero";
  return rep;
}

Trace ray_doubling_trace(const Energy& energy, const SpinorField& f, int doublings) {
  Trace trace;
  const double base = energy.dirac().sobolev_norm(f, energy.p());
  double t = 1.0;
  for (int i = 0; i <= doublings; ++i) {
    trace.push_back({i, 0, 'e', energy.value(t * f), 0.0, t * base, t});
    t *= 2.0;
  }
  return trace;
}

PsReport ps_diagnostic(const Energy& energy, const Trace& trace) {
  (void)energy;
  PsReport rep;
  if (trace.empty()) {
    rep.label = "empty trace";
    return rep;
  }
  double max_norm = 0.0;
  bool all_finite = true;
  for (const TraceEntry& e : trace) {
    max_norm = std::max(max_norm, e.norm_1p);
    if (!std::isfinite(e.norm_1p) || !std::isfinite(e.value)) all_finite = false;
  }
  rep.max_norm = max_norm;
  rep.bounded = all_finite && max_norm <= 1e8;

  std::size_t tail_start = 0;
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace[i].phase == 'R') tail_start = i;
  rep.residual_monotone_tail = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = tail_start; i < trace.size(); ++i) {
    if (trace[i].phase == 'R' || trace[i].phase == 'e') continue;
    if (trace[i].residual > prev + 1e-12) rep.residual_monotone_tail = false;
    prev = trace[i].residual;
    rep.final_residual = trace[i].residual;
  }

  const bool ray = trace.back().phase == 'e';
  if (ray && !rep.bounded && trace.back().value < 0.0) {
    rep.label = "escaping ray with unbounded norm (expected under superlinear growth); "
                "not a compactness failure";
  } else if (rep.bounded) {
    rep.label = "bounded iterate path";
  } else {
    rep.label = "unbounded iterate path";
  }
  return rep;
}

double weak_solution_check(const Energy& energy, const SpinorField& psi, int count,
                           std::uint64_t seed, const std::vector<SpinorField>* subspace) {
  SpinorField g = energy.gradient(psi);
  double worst = 0.0;
  for (int t = 0; t < count; ++t) {
    SpinorField phi = random_field(energy.dirac().model_ptr(), energy.dirac().spinor_dim(),
                                   seed + static_cast<std::uint64_t>(t));
    phi = maybe_project(std::move(phi), subspace);
    const double n = energy.dirac().sobolev_norm(phi, energy.p());
    if (!(n > 0.0)) continue;
    scale(phi, Complex{1.0 / n, 0.0});
    worst = std::max(worst, std::abs(inner(g, phi)));
  }
  return worst;
}

}  // namespace pdirac
