#ifndef PDIRAC_COMMANDS_HPP
#define PDIRAC_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "pdirac/critical.hpp"
#include "pdirac/eigen.hpp"

namespace pdirac {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitVerify = 4;

/// One experiment: model + exponent + nonlinearity + solver settings.
/// Parsed from JSON; command-line flags override individual fields.
struct RunConfig {
  int m = 3;
  std::vector<int> grid{8, 8, 8};
  std::vector<double> lengths;
  std::vector<double> twist{0.5, 0.5, 0.5};

  double p = 2.0;
  double eps = -1.0;
  bool override_p_range = false;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  Nonlinearity nonlinearity = Nonlinearity::zero();

  int spectrum_count = 8;

  EigenConfig eigen;
  int ls_count = 0;  // > 0 switches cmd_eigen to the deflated sequence

  SolveConfig solve;
  std::string algorithm = "mountain_pass";
  int kmax = 4;
  bool seed_at_constant_branch = false;
  bool dump_fields = false;

  static RunConfig from_json_text(const std::string& text);
  std::string to_json_text() const;

  /// Throws std::invalid_argument with a message suitable for the error
  /// JSON on violations.
  void validate() const;

  /// Content hash of the canonical JSON form; stamped into every output.
  std::string content_hash() const;
};

struct CommandOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool override_p_range = false;
};

RunConfig apply_overrides(RunConfig config, const CommandOverrides& overrides);

int cmd_spectrum(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_eigen(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& suite, const RunConfig& config, std::ostream& out,
               std::ostream& err);
int cmd_report(const std::string& dir, std::ostream& out, std::ostream& err);

}  // namespace pdirac

#endif
