#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pdirac/commands.hpp"
#include "pdirac/io.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool override_p_range = false;
};

void attach_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "JSON experiment configuration");
  if (config_required) opt->required();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&args](std::uint64_t s) { args.seed = s; }, "override the configured seed");
  cmd->add_option_function<std::string>(
      "--out", [&args](const std::string& d) { args.out_dir = d; },
      "override the output directory");
  cmd->add_flag("--override-p-range", args.override_p_range,
                "allow exponents and twists outside the validated range");
}

pdirac::RunConfig load_config(const CommonArgs& args) {
  pdirac::RunConfig config;
  if (!args.config_path.empty())
    config = pdirac::RunConfig::from_json_text(pdirac::read_text_file(args.config_path));
  pdirac::CommandOverrides overrides;
  overrides.seed = args.seed;
  overrides.out_dir = args.out_dir;
  overrides.override_p_range = args.override_p_range;
  return pdirac::apply_overrides(std::move(config), overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational toolkit for nonlinear Dirac-type problems on flat spin tori"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, eigen_args, solve_args, verify_args;
  std::string verify_suite = "all";
  std::string report_dir;

  auto* spectrum = app.add_subcommand("spectrum", "dump the exact operator spectrum");
  attach_common(spectrum, spectrum_args, true);

  auto* eigen = app.add_subcommand("eigen", "nonlinear eigenvalue runs");
  attach_common(eigen, eigen_args, true);

  auto* solve = app.add_subcommand("solve", "critical point solvers");
  attach_common(solve, solve_args, true);

  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  verify->add_option("suite", verify_suite,
                     "clifford | norms | gradient | monotone | oracle | all");
  attach_common(verify, verify_args, false);

  auto* report = app.add_subcommand("report", "summarize a results directory");
  report->add_option("dir", report_dir, "directory with manifest.json and CSVs")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum->parsed())
      return pdirac::cmd_spectrum(load_config(spectrum_args), std::cout, std::cerr);
    if (eigen->parsed())
      return pdirac::cmd_eigen(load_config(eigen_args), std::cout, std::cerr);
    if (solve->parsed())
      return pdirac::cmd_solve(load_config(solve_args), std::cout, std::cerr);
    if (verify->parsed())
      return pdirac::cmd_verify(verify_suite, load_config(verify_args), std::cout, std::cerr);
    if (report->parsed()) return pdirac::cmd_report(report_dir, std::cout, std::cerr);
  } catch (const std::exception& ex) {
    std::cerr << "{\"error\": \"" << ex.what() << "\"}\n";
    return pdirac::kExitConfig;
  }
  return pdirac::kExitConfig;
}
