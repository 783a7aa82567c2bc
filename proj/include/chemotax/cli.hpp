#pragma once

/// Command-line front end: simulate / stability / sweep / lyapunov /
/// probe subcommands over a config file, writing CSV outputs and a
/// manifest under an output directory. Exit codes: 0 success (a
/// blow-up verdict is a scientific result, not a failure), 1 config
/// error (the message names the offending key, path, or flag), 2
/// runtime failure.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace chemotax::cli {

struct CliInvocation {
  std::string subcommand;  // simulate|stability|sweep|lyapunov|probe|help
  std::string config_path;
  std::string output_dir = "out";
  std::vector<std::string> overrides;  // --set key=value, applied in order
  int workers = 0;                     // 0 = CHEMOTAX_WORKERS or hardware
  std::optional<std::uint64_t> seed;   // replaces run.rng_seed
  // sweep grid: chi_min + i * chi_step up to chi_max inclusive
  double chi_min = 0.0;
  double chi_max = 20.0;
  double chi_step = 0.5;
  // probe targets; empty = {0.5, 3} x M_c(D, chi) from the config
  std::vector<double> masses;
};

/// Parse argv (program name excluded). Empty args or --help yield the
/// help subcommand. Throws Error{BadValue} on unknown or incomplete
/// flags.
CliInvocation parse_args(const std::vector<std::string>& args);

std::string usage();

/// Execute one invocation; human-readable progress goes to `out`,
/// error text to `err`. Returns the process exit code.
int run_cli(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// parse_args + run_cli over stdio, catching argument errors.
int cli_main(int argc, char** argv);

}  // namespace chemotax::cli
