// End-to-end acceptance runs: one pass/fail line per criterion, nonzero
// exit if any fails. Invoked by ctest as `pdirac_acceptance`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "pdirac/commands.hpp"
#include "pdirac/critical.hpp"
#include "pdirac/eigen.hpp"
#include "pdirac/io.hpp"

using namespace pdirac;

namespace {

constexpr double kPi = std::numbers::pi;
int failures = 0;

void report(int index, const std::string& name, bool ok, const std::string& detail,
            double seconds) {
  if (!ok) ++failures;
  std::printf("[%s] %2d %-38s %s  (%.1fs)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

ModelPtr cube(std::vector<double> twist, int n = 8) {
  return std::make_shared<TorusModel>(3, std::vector<int>{n, n, n}, std::vector<double>{},
                                      std::move(twist));
}

SpinorField unit_random(const DiracOperator& dirac, std::uint64_t seed) {
  SpinorField f = random_field(dirac.model_ptr(), dirac.spinor_dim(), seed);
  scale(f, Complex{1.0 / l2_norm(f), 0.0});
  return f;
}

void criterion_1_clifford() {
  Timer timer;
  double relation_defect = 0.0;
  double symbol_defect = 0.0;
  std::mt19937_64 gen(2024);
  for (int m = 2; m <= 6; ++m) {
    GammaSet g = build_gamma(m);
    relation_defect = std::max(relation_defect, check_relations(g));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> xi(static_cast<std::size_t>(m));
      double nsq = 0.0;
      for (double& x : xi) {
        x = std::generate_canonical<double, 53>(gen) * 2.0 - 1.0;
        nsq += x * x;
      }
      Matrix sym = dirac_symbol(g, xi);
      Matrix sq = sym * sym - nsq * Matrix::Identity(g.spinor_dim, g.spinor_dim);
      symbol_defect = std::max(symbol_defect, sq.cwiseAbs().maxCoeff());
    }
  }
  const bool ok = relation_defect < 1e-14 && symbol_defect < 1e-13;
  std::ostringstream detail;
  detail << "relations " << format_double(relation_defect) << ", symbol "
         << format_double(symbol_defect);
  report(1, "gamma relations m=2..6", ok, detail.str(), timer.seconds());
}

void criterion_2_exact_spectrum() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.5, 0.5}));
  const double lead = dirac->spectrum(1).front().eigenvalue;
  const double exact_lead = kPi * std::sqrt(3.0);
  const bool spectrum_ok = std::abs(lead - exact_lead) / exact_lead < 1e-12;

  EigenConfig cfg;
  cfg.p = 2.0;
  cfg.max_iter = 500;
  cfg.restarts = 3;
  EigenPair pair = min_eigen(*dirac, cfg);
  const double exact_lambda = 3.0 * kPi * kPi;
  const bool eigen_ok = pair.accepted && pair.iterations < 500 &&
                        std::abs(pair.lambda - exact_lambda) / exact_lambda < 1e-8;

  std::ostringstream detail;
  detail << "lead " << format_double(lead) << ", lambda1 " << format_double(pair.lambda)
         << " in " << pair.iterations << " iters";
  report(2, "exact p=2 spectrum", spectrum_ok && eigen_ok, detail.str(), timer.seconds());
}

void criterion_3_flat_weitzenbock() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    SpinorField f = unit_random(*dirac, 10 + t);
    SpinorField diff = dirac->apply(dirac->apply(f)) - dirac->apply_laplacian(f);
    for (const Complex& v : diff.values) worst = std::max(worst, std::abs(v));
  }
  report(3, "squared action vs Laplacian", worst < 1e-12, format_double(worst),
         timer.seconds());
}

void criterion_4_self_adjoint() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    SpinorField f = unit_random(*dirac, 100 + t);
    SpinorField g = unit_random(*dirac, 500 + t);
    worst = std::max(worst, std::abs(inner(dirac->apply(f), g) - inner(f, dirac->apply(g))));
  }
  report(4, "self-adjointness", worst < 1e-12, format_double(worst), timer.seconds());
}

void criterion_5_gradient() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  bool ok = true;
  std::ostringstream detail;
  for (double p : {2.0, 1.5, 3.0}) {
    Energy energy(dirac, p, Nonlinearity::power(1.0, 2.5), p == 2.0 ? 0.0 : 1e-6, true);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      SpinorField f = unit_random(*dirac, 1000 + t);
      SpinorField xi = unit_random(*dirac, 2000 + t);
      const double h = 1e-5;
      const double fd = (energy.value(f + h * xi) - energy.value(f - h * xi)) / (2.0 * h);
      const double an = inner(energy.gradient(f), xi);
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(fd)));
    }
    ok = ok && worst < (p == 2.0 ? 1e-6 : 1e-4);
    detail << "p=" << format_double(p) << ":" << format_double(worst) << " ";
  }
  report(5, "derivative vs finite differences", ok, detail.str(), timer.seconds());
}

void criterion_6_monotone() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  bool ok = true;
  for (double p : {1.5, 2.0, 3.0}) {
    for (int t = 0; t < 1000; ++t) {
      SpinorField f = random_field(dirac->model_ptr(), dirac->spinor_dim(), 3000 + t);
      SpinorField g = random_field(dirac->model_ptr(), dirac->spinor_dim(), 9000 + t);
      ok = ok && monotone_inequality_check(*dirac, p, f, g).holds;
    }
    SpinorField f = random_field(dirac->model_ptr(), dirac->spinor_dim(), 77);
    SpinorField zero(dirac->model_ptr(), dirac->spinor_dim());
    MonotoneResult same = monotone_inequality_check(*dirac, p, f, f);
    MonotoneResult origin = monotone_inequality_check(*dirac, p, f, zero);
    ok = ok && std::abs(same.lhs) < 1e-10 && std::abs(same.rhs) < 1e-10 &&
         std::abs(origin.lhs - origin.rhs) < 1e-10 * std::max(1.0, std::abs(origin.rhs));
  }
  report(6, "monotone operator inequality", ok, "1000 pairs, p in {1.5,2,3}", timer.seconds());
}

void criterion_7_eigen_stability() {
  Timer timer;
  bool ok = true;
  std::ostringstream detail;
  struct Setup {
    int m;
    double p;
    std::vector<double> twist;
  };
  for (const Setup& s : {Setup{2, 1.5, {0.5, 0.0}}, Setup{3, 3.0, {0.5, 0.0, 0.0}}}) {
    auto model = std::make_shared<TorusModel>(
        s.m, std::vector<int>(static_cast<std::size_t>(s.m), 8), std::vector<double>{},
        s.twist);
    auto dirac = make_dirac(model);
    std::vector<double> lambdas;
    bool all_accepted = true;
    for (int restart = 0; restart < 8; ++restart) {
      EigenConfig cfg;
      cfg.p = s.p;
      cfg.restarts = 1;
      cfg.seed = static_cast<std::uint64_t>(restart);
      cfg.override_p_range = true;
      cfg.tolerance = 1e-5;  // double-resolution floor away from p = 2
      EigenPair pair = min_eigen(*dirac, cfg);
      all_accepted = all_accepted && pair.accepted;
      lambdas.push_back(pair.lambda);
    }
    double lo = lambdas.front(), hi = lambdas.front();
    for (double l : lambdas) {
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
    const bool agree = (hi - lo) / lo < 1e-4;
    const double upper = std::pow(dirac->min_momentum(), s.p);

    EigenConfig tc;
    tc.p = s.p;
    tc.restarts = 4;
    tc.override_p_range = true;
    tc.tolerance = 1e-5;
    TailResult tau0 = tail_embedding_constant(*dirac, s.p, s.p, 0, tc);
    const bool bounds = lo <= upper + 1e-9 && lo >= std::pow(tau0.tau, s.p) * (1.0 - 1e-6);
    ok = ok && all_accepted && agree && bounds;
    detail << "p=" << format_double(s.p) << " lambda1=" << format_double(lo) << " ";
  }
  report(7, "nonlinear eigen stability", ok, detail.str(), timer.seconds());
}

void criterion_8_ls_sequence() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.5, 0.5}));
  bool ok = true;

  EigenConfig cfg;
  cfg.p = 2.0;
  cfg.restarts = 3;
  auto exact = ls_sequence(*dirac, cfg, 5);
  ok = ok && exact.size() == 5;
  for (const EigenPair& pair : exact) {
    ok = ok && pair.accepted &&
         std::abs(pair.lambda - 3.0 * kPi * kPi) / (3.0 * kPi * kPi) < 1e-6;
  }

  for (double p : {1.5, 3.0}) {
    EigenConfig gc;
    gc.p = p;
    gc.restarts = 3;
    gc.tolerance = 1e-5;  // double-resolution floor away from p = 2
    gc.override_p_range = true;
    auto seq = ls_sequence(*dirac, gc, 5);
    ok = ok && seq.size() == 5;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      ok = ok && seq[i].accepted && seq[i].lambda > 0.0;
      if (i) ok = ok && seq[i].lambda >= seq[i - 1].lambda - 1e-10;
    }
  }
  report(8, "deflated eigenvalue sequence", ok, "p in {2,1.5,3}, n=5", timer.seconds());
}

void criterion_9_mountain_pass() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  Energy energy(dirac, 2.0, Nonlinearity::power(1.0, 4.0));

  SolveConfig generic;
  generic.seed = 1;
  CriticalPoint wild = mountain_pass(energy, generic);
  bool ok = wild.accepted && wild.value > 0.0 && wild.grad_residual < 1e-6 &&
            wild.nehari < 1e-6;

  SolveConfig seeded;
  seeded.max_iter = 4000;
  CriticalPoint branch = mountain_pass(energy, seeded, constant_branch(energy));
  const double expected = std::pow(kPi, 4.0) / 4.0;
  ok = ok && branch.accepted && std::abs(branch.value - expected) / expected < 1e-6;

  std::ostringstream detail;
  detail << "generic " << format_double(wild.value) << ", branch "
         << format_double(branch.value);
  report(9, "mountain pass", ok, detail.str(), timer.seconds());
}

void criterion_10_sublinear_minimum() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  Energy energy(dirac, 2.0, Nonlinearity::power(1.0, 1.5));
  SolveConfig cfg;
  CriticalPoint point = global_minimize(energy, cfg);
  const double branch_value = std::pow(kPi, -6.0) * (0.5 - 2.0 / 3.0);
  const bool ok = point.accepted && point.value < 0.0 &&
                  point.value <= branch_value + 1e-8 && point.grad_residual < 1e-6;
  std::ostringstream detail;
  detail << format_double(point.value) << " vs branch " << format_double(branch_value);
  report(10, "sublinear minimization", ok, detail.str(), timer.seconds());
}

void criterion_11_multiplicity_trends() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));

  Energy up(dirac, 2.0, Nonlinearity::power(1.0, 4.0));
  SolveConfig cfg;
  cfg.max_iter = 8000;
  auto fountain = fountain_sequence(up, cfg, 4);
  bool ok = fountain.size() == 4 && fountain_trend(fountain).ok;

  Energy down(dirac, 2.0, Nonlinearity::power(1.0, 1.5));
  auto dual = dual_fountain_sequence(down, cfg, 4);
  ok = ok && dual.size() == 4 && dual_fountain_trend(dual).ok;

  std::ostringstream detail;
  if (fountain.size() == 4 && dual.size() == 4)
    detail << "up " << format_double(fountain.front().value) << ".."
           << format_double(fountain.back().value) << ", down "
           << format_double(dual.front().value) << ".." << format_double(dual.back().value);
  report(11, "multiplicity trends", ok, detail.str(), timer.seconds());
}

void criterion_12_tail_constants() {
  Timer timer;
  auto dirac = make_dirac(cube({0.5, 0.0, 0.0}));
  bool ok = true;

  const double analytic[6] = {kPi, kPi, kPi, kPi, kPi * std::sqrt(5.0), kPi * std::sqrt(5.0)};
  double prev = 0.0;
  for (int k = 0; k <= 5; ++k) {
    EigenConfig cfg;
    cfg.restarts = 3;
    TailResult t = tail_embedding_constant(*dirac, 2.0, 2.0, k, cfg);
    ok = ok && t.accepted && std::abs(t.tau - analytic[k]) / analytic[k] < 1e-8 &&
         t.tau >= prev - 1e-9;
    prev = t.tau;
  }

  prev = 0.0;
  for (int k = 0; k <= 5; ++k) {
    EigenConfig cfg;
    cfg.restarts = 3;
    TailResult t = tail_embedding_constant(*dirac, 2.0, 1.5, k, cfg);
    ok = ok && t.accepted && t.tau >= prev - 1e-9;
    prev = t.tau;
  }
  report(12, "tail narrowing constants", ok, "k=0..5, (p,q)=(2,2),(2,1.5)", timer.seconds());
}

void criterion_13_determinism() {
  Timer timer;
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "pdirac_acceptance_determinism";
  fs::remove_all(base);

  RunConfig config;
  config.m = 3;
  config.grid = {8, 8, 8};
  config.twist = {0.5, 0.0, 0.0};
  config.p = 2.0;
  config.nonlinearity = Nonlinearity::power(1.0, 4.0);
  config.eigen.restarts = 2;
  config.algorithm = "mountain_pass";
  config.seed_at_constant_branch = true;
  config.solve.max_iter = 4000;
  config.spectrum_count = 4;

  bool ok = true;
  std::ostringstream sink_out, sink_err;
  for (const char* name : {"a", "b"}) {
    config.out_dir = (base / name).string();
    ok = ok && cmd_spectrum(config, sink_out, sink_err) == 0;
    ok = ok && cmd_eigen(config, sink_out, sink_err) == 0;
    ok = ok && cmd_solve(config, sink_out, sink_err) == 0;
  }
  for (const char* file : {"spectrum.csv", "eigen.csv", "solve.csv"}) {
    ok = ok && read_text_file((base / "a" / file).string()) ==
                   read_text_file((base / "b" / file).string());
  }
  report(13, "byte-identical reruns", ok, "spectrum + eigen + solve", timer.seconds());
}

}  // namespace

int main() {
  criterion_1_clifford();
  criterion_2_exact_spectrum();
  criterion_3_flat_weitzenbock();
  criterion_4_self_adjoint();
  criterion_5_gradient();
  criterion_6_monotone();
  criterion_7_eigen_stability();
  criterion_8_ls_sequence();
  criterion_9_mountain_pass();
  criterion_10_sublinear_minimum();
  criterion_11_multiplicity_trends();
  criterion_12_tail_constants();
  criterion_13_determinism();
  if (failures) {
    std::printf("%d criterion(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all 13 criteria passed\n");
  return 0;
}
