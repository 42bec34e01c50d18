#include "pdirac/commands.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pdirac/io.hpp"

namespace pdirac {

namespace {

using nlohmann::json;

json model_json(const RunConfig& c) {
  json j;
  j["m"] = c.m;
  j["grid"] = c.grid;
  j["lengths"] = c.lengths.empty() ? std::vector<double>(static_cast<std::size_t>(c.m), 1.0)
                                   : c.lengths;
  j["twist"] = c.twist;
  return j;
}

json nonlinearity_json(const Nonlinearity& nl) {
  json j;
  j["kind"] = nl.kind == Nonlinearity::Kind::power ? "power" : "zero";
  if (nl.kind == Nonlinearity::Kind::power) {
    j["c"] = nl.c;
    j["e"] = nl.e;
    j["eps_H"] = nl.eps_h;
  }
  return j;
}

Nonlinearity nonlinearity_from_json(const json& j) {
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return Nonlinearity::zero();
  if (kind == "power")
    return Nonlinearity::power(j.value("c", 1.0), j.value("e", 4.0), j.value("eps_H", -1.0));
  throw std::invalid_argument("nonlinearity.kind must be 'zero' or 'power'");
}

void emit_error(std::ostream& err, const std::string& message) {
  json j;
  j["error"] = message;
  err << j.dump() << '\n';
}

ModelPtr build_model(const RunConfig& c) {
  return std::make_shared<TorusModel>(c.m, c.grid, c.lengths, c.twist);
}

std::string manifest_text(const RunConfig& c, const std::string& command) {
  json j;
  j["command"] = command;
  j["config"] = json::parse(c.to_json_text());
  j["config_hash"] = c.content_hash();
  auto model = build_model(c);
  j["derived"]["volume"] = model->volume();
  j["derived"]["cell_volume"] = model->cell_volume();
  j["derived"]["spinor_dim"] = spinor_dimension(c.m);
  j["derived"]["invertible"] = model->invertible();
  j["derived"]["classification"] =
      json::parse(classify(c.nonlinearity, c.p, c.m).to_json());
  return j.dump(2) + "\n";
}

void write_outputs(const RunConfig& c, const std::string& command,
                   const std::string& csv_name, const std::string& csv_content) {
  std::filesystem::create_directories(c.out_dir);
  write_text_file(c.out_dir + "/" + csv_name, csv_content);
  write_text_file(c.out_dir + "/manifest.json", manifest_text(c, command));
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  if (j.contains("model")) {
    const json& m = j["model"];
    c.m = m.value("m", c.m);
    if (m.contains("grid")) c.grid = m["grid"].get<std::vector<int>>();
    if (m.contains("lengths")) c.lengths = m["lengths"].get<std::vector<double>>();
    if (m.contains("twist")) c.twist = m["twist"].get<std::vector<double>>();
  }
  c.p = j.value("p", c.p);
  c.eps = j.value("eps", c.eps);
  c.override_p_range = j.value("override_p_range", false);
  c.seed = j.value("seed", static_cast<std::uint64_t>(0));
  c.out_dir = j.value("out", c.out_dir);
  if (j.contains("nonlinearity")) c.nonlinearity = nonlinearity_from_json(j["nonlinearity"]);
  if (j.contains("spectrum")) c.spectrum_count = j["spectrum"].value("count", c.spectrum_count);
  if (j.contains("eigen")) {
    const json& e = j["eigen"];
    c.eigen.tolerance = e.value("tolerance", c.eigen.tolerance);
    c.eigen.max_iter = e.value("max_iter", c.eigen.max_iter);
    c.eigen.restarts = e.value("restarts", c.eigen.restarts);
    c.eigen.armijo = e.value("armijo", c.eigen.armijo);
    c.eigen.grow = e.value("grow", c.eigen.grow);
    c.eigen.shrink = e.value("shrink", c.eigen.shrink);
    c.ls_count = e.value("ls_count", c.ls_count);
  }
  if (j.contains("solve")) {
    const json& s = j["solve"];
    c.algorithm = s.value("algorithm", c.algorithm);
    c.solve.tol = s.value("tol", c.solve.tol);
    c.solve.max_iter = s.value("max_iter", c.solve.max_iter);
    c.solve.path_points = s.value("path_points", c.solve.path_points);
    c.solve.restarts = s.value("restarts", c.solve.restarts);
    c.solve.galerkin_k = s.value("galerkin_k", c.solve.galerkin_k);
    c.solve.armijo = s.value("armijo", c.solve.armijo);
    c.solve.grow = s.value("grow", c.solve.grow);
    c.solve.shrink = s.value("shrink", c.solve.shrink);
    c.solve.rim_radius = s.value("rim_radius", c.solve.rim_radius);
    c.solve.rim_samples = s.value("rim_samples", c.solve.rim_samples);
    c.kmax = s.value("kmax", c.kmax);
    c.seed_at_constant_branch = s.value("seed_at_constant_branch", false);
    c.dump_fields = s.value("dump_fields", false);
  }
  return c;
}

std::string RunConfig::to_json_text() const {
  json j;
  j["model"] = model_json(*this);
  j["p"] = p;
  j["eps"] = eps;
  j["override_p_range"] = override_p_range;
  j["seed"] = seed;
  j["out"] = out_dir;
  j["nonlinearity"] = nonlinearity_json(nonlinearity);
  j["spectrum"]["count"] = spectrum_count;
  j["eigen"] = {{"tolerance", eigen.tolerance},
                {"max_iter", eigen.max_iter},
                {"restarts", eigen.restarts},
                {"armijo", eigen.armijo},
                {"grow", eigen.grow},
                {"shrink", eigen.shrink},
                {"ls_count", ls_count}};
  j["solve"] = {{"algorithm", algorithm},
                {"tol", solve.tol},
                {"max_iter", solve.max_iter},
                {"path_points", solve.path_points},
                {"restarts", solve.restarts},
                {"galerkin_k", solve.galerkin_k},
                {"armijo", solve.armijo},
                {"grow", solve.grow},
                {"shrink", solve.shrink},
                {"rim_radius", solve.rim_radius},
                {"rim_samples", solve.rim_samples},
                {"kmax", kmax},
                {"seed_at_constant_branch", seed_at_constant_branch},
                {"dump_fields", dump_fields}};
  return j.dump(2);
}

void RunConfig::validate() const {
  if (m < 2) throw std::invalid_argument("model.m must be >= 2");
  if (static_cast<int>(grid.size()) != m)
    throw std::invalid_argument("model.grid must have m entries");
  for (int n : grid)
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("model.grid entries must be even and >= 4");
  for (double d : twist)
    if (d != 0.0 && d != 0.5)
      throw std::invalid_argument("model.twist entries must be 0 or 0.5");
  if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  if (!override_p_range && !(p < static_cast<double>(m)))
    throw std::invalid_argument("p must satisfy 1 < p < m (or set override_p_range)");
  bool any_twist = false;
  for (double d : twist) any_twist = any_twist || d != 0.0;
  if (!any_twist && !override_p_range)
    throw std::invalid_argument(
        "all-zero twist makes the Dirac operator singular (set override_p_range to proceed)");
  if (algorithm != "mountain_pass" && algorithm != "minimize" && algorithm != "fountain" &&
      algorithm != "dual_fountain")
    throw std::invalid_argument("solve.algorithm must be one of mountain_pass | minimize | "
                                "fountain | dual_fountain");
}

std::string RunConfig::content_hash() const {
  // The hash identifies the experiment; where it is written is not part of
  // that identity.
  json j = json::parse(to_json_text());
  j.erase("out");
  return git_blob_hash(j.dump(2));
}

RunConfig apply_overrides(RunConfig config, const CommandOverrides& overrides) {
  if (overrides.seed) {
    config.seed = *overrides.seed;
    config.eigen.seed = *overrides.seed;
    config.solve.seed = *overrides.seed;
  }
  if (overrides.out_dir) config.out_dir = *overrides.out_dir;
  if (overrides.override_p_range) config.override_p_range = true;
  return config;
}

int cmd_spectrum(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const std::exception& ex) {
    emit_error(err, ex.what());
    return kExitConfig;
  }
  auto dirac = make_dirac(build_model(config));
  auto entries = dirac->spectrum(config.spectrum_count);

  std::string csv = "# config " + config.content_hash() + "\n";
  csv += "index,eigenvalue,multiplicity,mode\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::string mode;
    for (std::size_t j = 0; j < entries[i].mode.size(); ++j) {
      if (j) mode.push_back(' ');
      mode += std::to_string(entries[i].mode[j]);
    }
    csv += csv_row({std::to_string(i), format_double(entries[i].eigenvalue),
                    std::to_string(entries[i].multiplicity), "\"" + mode + "\""});
  }
  write_outputs(config, "spectrum", "spectrum.csv", csv);
  out << "wrote " << config.out_dir << "/spectrum.csv (" << entries.size() << " rows)\n";
  return kExitOk;
}

int cmd_eigen(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const std::exception& ex) {
    emit_error(err, ex.what());
    return kExitConfig;
  }
  auto dirac = make_dirac(build_model(config));
  EigenConfig ec = config.eigen;
  ec.p = config.p;
  ec.eps = config.eps;
  ec.seed = config.seed;
  ec.override_p_range = config.override_p_range;

  std::vector<EigenPair> pairs;
  if (config.ls_count > 0) {
    pairs = ls_sequence(*dirac, ec, config.ls_count);
  } else {
    pairs.push_back(min_eigen(*dirac, ec));
  }

  std::string csv = "# config " + config.content_hash() + "\n";
  csv += "index,lambda,residual,iterations,seed\n";
  bool all_ok = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    all_ok = all_ok && pairs[i].accepted;
    csv += csv_row({std::to_string(i), format_double(pairs[i].lambda),
                    format_double(pairs[i].residual), std::to_string(pairs[i].iterations),
                    std::to_string(pairs[i].seed)});
  }
  write_outputs(config, "eigen", "eigen.csv", csv);
  out << "wrote " << config.out_dir << "/eigen.csv (" << pairs.size() << " rows)\n";
  if (!all_ok) {
    emit_error(err, "one or more eigen runs did not reach tolerance");
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const std::exception& ex) {
    emit_error(err, ex.what());
    return kExitConfig;
  }
  auto dirac = make_dirac(build_model(config));
  SolveConfig sc = config.solve;
  sc.seed = config.seed;

  std::vector<CriticalPoint> points;
  std::string trend_note;
  try {
    Energy energy(dirac, config.p, config.nonlinearity, config.eps, config.override_p_range);
    if (config.algorithm == "mountain_pass") {
      std::optional<SpinorField> direction;
      if (config.seed_at_constant_branch) direction = constant_branch(energy);
      points.push_back(mountain_pass(energy, sc, std::move(direction)));
    } else if (config.algorithm == "minimize") {
      points.push_back(global_minimize(energy, sc));
    } else if (config.algorithm == "fountain") {
      const int kmax = config.solve.galerkin_k > 0 ? config.solve.galerkin_k : config.kmax;
      points = fountain_sequence(energy, sc, kmax);
      trend_note = fountain_trend(points).message;
    } else {
      const int kmax = config.solve.galerkin_k > 0 ? config.solve.galerkin_k : config.kmax;
      points = dual_fountain_sequence(energy, sc, kmax);
      trend_note = dual_fountain_trend(points).message;
    }
  } catch (const std::invalid_argument& ex) {
    emit_error(err, ex.what());
    return kExitConfig;
  }

  std::string csv = "# config " + config.content_hash() + "\n";
  csv += "kind,k,value,grad_residual,nehari_defect,iterations,seed\n";
  bool all_ok = !points.empty();
  for (const CriticalPoint& pt : points) {
    all_ok = all_ok && pt.accepted;
    csv += csv_row({to_string(pt.kind), std::to_string(pt.k), format_double(pt.value),
                    format_double(pt.grad_residual), format_double(pt.nehari),
                    std::to_string(pt.iterations), std::to_string(pt.seed)});
  }
  write_outputs(config, "solve", "solve.csv", csv);
  if (config.dump_fields) {
    for (std::size_t i = 0; i < points.size(); ++i)
      save_field(points[i].field,
                 config.out_dir + "/field_" + std::to_string(i) + ".json");
  }
  out << "wrote " << config.out_dir << "/solve.csv (" << points.size() << " rows)\n";
  if (!trend_note.empty()) out << "trend: " << trend_note << '\n';
  if (!all_ok) {
    for (const CriticalPoint& pt : points)
      if (!pt.accepted) emit_error(err, "k=" + std::to_string(pt.k) + ": " + pt.message);
    return kExitSolver;
  }
  return kExitOk;
}

namespace {

struct VerifyTable {
  std::ostream& out;
  bool all_ok = true;
  void row(const std::string& name, bool ok, const std::string& detail = "") {
    all_ok = all_ok && ok;
    out << (ok ? "[PASS] " : "[FAIL] ") << name;
    if (!detail.empty()) out << "  (" << detail << ")";
    out << '\n';
  }
};

void verify_clifford(VerifyTable& table) {
  for (int m = 2; m <= 6; ++m) {
    GammaSet g = build_gamma(m);
    double defect = check_relations(g);
    table.row("clifford relations m=" + std::to_string(m), defect < 1e-14,
              "defect " + format_double(defect));
  }
  GammaSet g = build_gamma(4);
  std::mt19937_64 gen(7);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xi(4);
    double nsq = 0.0;
    for (double& x : xi) {
      x = std::generate_canonical<double, 53>(gen) - 0.5;
      nsq += x * x;
    }
    Matrix sym = dirac_symbol(g, xi);
    Matrix square = sym * sym - nsq * Matrix::Identity(g.spinor_dim, g.spinor_dim);
    worst = std::max(worst, square.cwiseAbs().maxCoeff());
  }
  table.row("symbol square identity m=4", worst < 1e-13, "defect " + format_double(worst));
}

void verify_norms(VerifyTable& table, const RunConfig& config) {
  auto dirac = make_dirac(build_model(config));
  double self_adj = 0.0, lich = 0.0, holder_violation = 0.0;
  for (int t = 0; t < 25; ++t) {
    SpinorField f = random_field(dirac->model_ptr(), dirac->spinor_dim(), 100 + t);
    SpinorField h = random_field(dirac->model_ptr(), dirac->spinor_dim(), 200 + t);
    scale(f, Complex{1.0 / l2_norm(f), 0.0});
    scale(h, Complex{1.0 / l2_norm(h), 0.0});
    self_adj = std::max(self_adj,
                        std::abs(inner(dirac->apply(f), h) - inner(f, dirac->apply(h))));
    SpinorField dd = dirac->apply(dirac->apply(f)) - dirac->apply_laplacian(f);
    for (const Complex& v : dd.values) lich = std::max(lich, std::abs(v));
    const double pq = 1.5;
    holder_violation = std::max(
        holder_violation,
        std::abs(inner(f, h)) - lp_norm(f, pq) * lp_norm(h, pq / (pq - 1.0)) - 1e-12);
  }
  table.row("self-adjointness", self_adj < 1e-12, format_double(self_adj));
  table.row("flat Weitzenbock identity", lich < 1e-12, format_double(lich));
  table.row("Holder pairing bound", holder_violation <= 0.0);
}

void verify_gradient(VerifyTable& table, const RunConfig& config) {
  auto dirac = make_dirac(build_model(config));
  for (double p : {1.5, 2.0, 3.0}) {
    const bool needs_override = !(p < static_cast<double>(config.m));
    Energy energy(dirac, p, Nonlinearity::power(1.0, 2.5), p == 2.0 ? 0.0 : 1e-6,
                  needs_override || config.override_p_range);
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      SpinorField f = random_field(dirac->model_ptr(), dirac->spinor_dim(), 300 + t);
      SpinorField xi = random_field(dirac->model_ptr(), dirac->spinor_dim(), 400 + t);
      scale(f, Complex{1.0 / l2_norm(f), 0.0});
      scale(xi, Complex{1.0 / l2_norm(xi), 0.0});
      const double h = 1e-5;
      const double fd =
          (energy.value(f + h * xi) - energy.value(f - h * xi)) / (2.0 * h);
      const double an = inner(energy.gradient(f), xi);
      worst = std::max(worst, std::abs(fd - an) / (1.0 + std::abs(fd)));
    }
    table.row("gradient vs finite differences p=" + format_double(p),
              worst < (p == 2.0 ? 1e-6 : 1e-4), format_double(worst));
  }
}

void verify_monotone(VerifyTable& table, const RunConfig& config) {
  auto dirac = make_dirac(build_model(config));
  for (double p : {1.5, 2.0, 3.0}) {
    bool all = true;
    for (int t = 0; t < 100; ++t) {
      SpinorField f = random_field(dirac->model_ptr(), dirac->spinor_dim(), 500 + t);
      SpinorField g = random_field(dirac->model_ptr(), dirac->spinor_dim(), 600 + t);
      all = all && monotone_inequality_check(*dirac, p, f, g).holds;
    }
    table.row("monotone operator inequality p=" + format_double(p), all);
  }
}

void verify_oracle(VerifyTable& table) {
  // Exact spectrum values on the fully twisted and singly twisted tori.
  auto full = make_dirac(std::make_shared<TorusModel>(
      3, std::vector<int>{8, 8, 8}, std::vector<double>{},
      std::vector<double>{0.5, 0.5, 0.5}));
  const double pi = std::numbers::pi;
  double lead = full->spectrum(1).front().eigenvalue;
  table.row("leading spectrum value on the fully twisted torus",
            std::abs(lead - pi * std::sqrt(3.0)) < 1e-12 * lead, format_double(lead));

  auto single = make_dirac(std::make_shared<TorusModel>(
      3, std::vector<int>{8, 8, 8}, std::vector<double>{},
      std::vector<double>{0.5, 0.0, 0.0}));
  Energy energy(single, 2.0, Nonlinearity::power(1.0, 4.0));
  CriticalPoint branch = constant_branch_point(energy);
  table.row("constant branch level",
            std::abs(branch.value - std::pow(pi, 4.0) / 4.0) < 1e-9, format_double(branch.value));
  table.row("constant branch residual", branch.grad_residual < 1e-8,
            format_double(branch.grad_residual));
  table.row("constant branch symmetry defect", branch.nehari < 1e-10,
            format_double(branch.nehari));
}

}  // namespace

int cmd_verify(const std::string& suite, const RunConfig& config, std::ostream& out,
               std::ostream& err) {
  RunConfig c = config;
  try {
    c.validate();
  } catch (const std::exception& ex) {
    emit_error(err, ex.what());
    return kExitConfig;
  }
  if (suite != "clifford" && suite != "norms" && suite != "gradient" && suite != "monotone" &&
      suite != "oracle" && suite != "all") {
    emit_error(err, "suite must be one of clifford | norms | gradient | monotone | oracle | all");
    return kExitConfig;
  }
  VerifyTable table{out};
  if (suite == "clifford" || suite == "all") verify_clifford(table);
  if (suite == "norms" || suite == "all") verify_norms(table, c);
  if (suite == "gradient" || suite == "all") verify_gradient(table, c);
  if (suite == "monotone" || suite == "all") verify_monotone(table, c);
  if (suite == "oracle" || suite == "all") verify_oracle(table);
  out << (table.all_ok ? "verification passed\n" : "verification FAILED\n");
  return table.all_ok ? kExitOk : kExitVerify;
}

int cmd_report(const std::string& dir, std::ostream& out, std::ostream& err) {
  const std::string manifest_path = dir + "/manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    emit_error(err, "no manifest.json under " + dir);
    return kExitConfig;
  }
  json manifest = json::parse(read_text_file(manifest_path));
  out << "run: " << manifest.value("command", "?") << "  config "
      << manifest.value("config_hash", "?") << '\n';
  for (const char* name : {"spectrum.csv", "eigen.csv", "solve.csv"}) {
    const std::string path = dir + "/" + std::string(name);
    if (!std::filesystem::exists(path)) continue;
    std::istringstream body(read_text_file(path));
    std::string line;
    int rows = -2;  // hash comment + header
    while (std::getline(body, line)) ++rows;
    out << "  " << name << ": " << rows << " data rows\n";
  }
  return kExitOk;
}

}  // namespace pdirac
