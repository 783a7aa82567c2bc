#include "chemotax/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "chemotax/config.hpp"
#include "chemotax/experiments.hpp"
#include "chemotax/io.hpp"
#include "chemotax/kinetics.hpp"
#include "chemotax/linstab.hpp"
#include "chemotax/simulate.hpp"

namespace chemotax::cli {

namespace {

[[noreturn]] void bad_flag(const std::string& what) {
  throw Error(Errc::BadValue, what);
}

double flag_double(const std::string& flag, const std::string& value) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    bad_flag("flag " + flag + " expects a number, got '" + value + "'");
  return x;
}

// Accumulates output files plus one role line each; written last so a
// manifest only ever lists files that are in place.
class OutputSet {
 public:
  explicit OutputSet(std::string dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content,
             const std::string& role) {
    atomic_write(dir_ + "/" + name, content);
    manifest_ += name + "\t" + role + "\n";
  }

  void finish() { atomic_write(dir_ + "/manifest.txt", manifest_); }

 private:
  std::string dir_;
  std::string manifest_;
};

std::string trimmed_number(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

std::vector<double> sweep_grid(const CliInvocation& inv) {
  if (!(inv.chi_step > 0.0))
    throw Error(Errc::BadValue, "flag --chi-step must be positive");
  if (!(inv.chi_max >= inv.chi_min))
    throw Error(Errc::BadValue, "flag --chi-max must be >= --chi-min");
  const long count =
      lround(std::floor((inv.chi_max - inv.chi_min) / inv.chi_step)) + 1;
  std::vector<double> chis;
  chis.reserve(size_t(count));
  for (long i = 0; i < count; ++i)
    chis.push_back(inv.chi_min + double(i) * inv.chi_step);
  return chis;
}

std::string termination_text(const simulate::RunRecord& rec) {
  std::ostringstream out;
  out << "termination = " << simulate::to_string(rec.termination.kind)
      << "\n";
  out << "t = " << format_double(rec.termination.t) << "\n";
  out << "rows = " << rec.series.rows() << "\n";
  out << "snapshots = " << rec.snapshot_times.size() << "\n";
  out << "wall_seconds = " << format_double(rec.wall_seconds) << "\n";
  for (const std::string& w : rec.warnings) out << "warning = " << w << "\n";
  return out.str();
}

int do_simulate(const RunConfig& cfg, const CliInvocation& inv,
                std::ostream& out) {
  const simulate::RunRecord rec = simulate::run(cfg);
  OutputSet files(inv.output_dir);
  files.write("metadata.cfg", config::run_config_text(cfg),
              "effective run configuration (re-runnable)");
  files.write("series.csv", simulate::series_csv(rec),
              "per-step scalar diagnostics");
  const auto names = field_names(cfg.model);
  for (size_t i = 0; i < rec.snapshots.size(); ++i)
    for (size_t j = 0; j < rec.snapshots[i].size(); ++j) {
      std::ostringstream name;
      name << "snap_" << std::setw(3) << std::setfill('0') << i << "_"
           << names[j] << ".csv";
      files.write(name.str(),
                  simulate::snapshot_csv(rec.snapshots[i][j], cfg.grid,
                                         rec.snapshot_times[i]),
                  "field snapshot");
    }
  files.write("result.txt", termination_text(rec), "run outcome summary");
  files.finish();
  out << "termination: " << simulate::to_string(rec.termination.kind)
      << " at t = " << format_double(rec.termination.t) << "\n";
  out << "wrote " << rec.snapshots.size() << " snapshot times under "
      << inv.output_dir << "\n";
  return 0;
}

int do_stability(const RunConfig& cfg, const CliInvocation& inv,
                 const linstab::TuringThreshold& threshold,
                 std::ostream& out) {
  const double chi = cfg.model.species.at(0).chi;
  std::ostringstream text;
  text << "chi_crit = " << trimmed_number(threshold.chi_crit) << "\n";
  text << "k_c^2 = " << trimmed_number(threshold.k_c * threshold.k_c)
       << "\n";
  text << "k_c = " << trimmed_number(threshold.k_c) << "\n";
  const char* verdict = chi > threshold.chi_crit    ? "supercritical"
                        : chi < threshold.chi_crit ? "subcritical"
                                                    : "critical";
  text << "chi = " << trimmed_number(chi) << " (" << verdict << ")\n";
  out << text.str();

  const std::string dispersion = experiments::dispersion_export(
      cfg.model, {0.0, threshold.chi_crit, chi}, 2.0 * threshold.k_c, 256);
  OutputSet files(inv.output_dir);
  files.write("metadata.cfg", config::run_config_text(cfg),
              "analyzed configuration");
  files.write("stability.txt", text.str(), "threshold analysis");
  files.write("dispersion.csv", dispersion,
              "growth-rate curves at chi = 0, chi_crit, and the config chi");
  files.finish();
  return 0;
}

int do_sweep(const RunConfig& cfg, const CliInvocation& inv,
             const std::vector<double>& chis, std::ostream& out) {
  const experiments::SweepResult res =
      experiments::bifurcation_sweep(cfg, chis, inv.workers);
  std::ostringstream text;
  if (res.transition_estimate)
    text << "transition = " << format_double(*res.transition_estimate)
         << "\n";
  else
    text << "transition = none\n";
  text << "points = " << res.chis.size() << "\n";
  out << text.str();
  OutputSet files(inv.output_dir);
  files.write("metadata.cfg", config::run_config_text(cfg),
              "sweep base configuration");
  files.write("sweep.csv", experiments::sweep_csv(res),
              "final-state maxima per chi");
  files.write("result.txt", text.str(), "transition estimate");
  files.finish();
  return 0;
}

int do_lyapunov(const RunConfig& cfg, const CliInvocation& inv,
                std::ostream& out) {
  const kinetics::LyapunovResult res = kinetics::lyapunov_spectrum(
      cfg.model, {cfg.ic.base[0], cfg.ic.base[1]}, cfg.t_final, cfg.dt);
  std::ostringstream text;
  for (size_t i = 0; i < res.exponents.size(); ++i)
    text << "lambda_" << (i + 1) << " = " << format_double(res.exponents[i])
         << "\n";
  text << "d_ky = " << format_double(res.d_ky) << "\n";
  out << text.str();
  CsvBuilder history({"t", "le1", "le2", "d_ky"});
  for (const auto& row : res.history)
    history.add_row({row[0], row[1], row[2], row[3]});
  OutputSet files(inv.output_dir);
  files.write("metadata.cfg", config::run_config_text(cfg),
              "kinetic system configuration");
  files.write("lyapunov.csv", history.str(),
              "exponent estimates per renormalization");
  files.write("result.txt", text.str(), "converged spectrum");
  files.finish();
  return 0;
}

int do_probe(const RunConfig& cfg, const CliInvocation& inv,
             const std::vector<double>& masses, std::ostream& out) {
  const experiments::MassProbe probe = experiments::critical_mass_probe(
      cfg.model.species.at(0).D, cfg.model.species.at(0).chi, masses,
      cfg.grid, cfg.t_final);
  CsvBuilder csv({"mass", "verdict"});
  std::ostringstream text;
  for (size_t i = 0; i < probe.masses.size(); ++i) {
    const std::string verdict = simulate::to_string(probe.verdicts[i]);
    csv.add_row_raw({format_double(probe.masses[i]), verdict});
    text << "mass " << format_double(probe.masses[i]) << ": " << verdict
         << "\n";
  }
  out << text.str();
  OutputSet files(inv.output_dir);
  files.write("metadata.cfg", config::run_config_text(cfg),
              "probe model configuration");
  files.write("probe.csv", csv.str(), "termination verdict per mass");
  files.write("result.txt", text.str(), "dichotomy verdicts");
  files.finish();
  return 0;
}

}  // namespace

CliInvocation parse_args(const std::vector<std::string>& args) {
  CliInvocation inv;
  if (args.empty()) {
    inv.subcommand = "help";
    return inv;
  }
  size_t i = 0;
  if (args[0] == "--help" || args[0] == "help") {
    inv.subcommand = "help";
    return inv;
  }
  inv.subcommand = args[i++];
  const auto value = [&](const std::string& flag) -> const std::string& {
    if (i >= args.size()) bad_flag("flag " + flag + " expects a value");
    return args[i++];
  };
  while (i < args.size()) {
    const std::string& flag = args[i++];
    if (flag == "--config") {
      inv.config_path = value(flag);
    } else if (flag == "--output") {
      inv.output_dir = value(flag);
    } else if (flag == "--set") {
      inv.overrides.push_back(value(flag));
    } else if (flag == "--workers") {
      inv.workers = int(flag_double(flag, value(flag)));
    } else if (flag == "--seed") {
      inv.seed = std::uint64_t(flag_double(flag, value(flag)));
    } else if (flag == "--chi-min") {
      inv.chi_min = flag_double(flag, value(flag));
    } else if (flag == "--chi-max") {
      inv.chi_max = flag_double(flag, value(flag));
    } else if (flag == "--chi-step") {
      inv.chi_step = flag_double(flag, value(flag));
    } else if (flag == "--mass") {
      inv.masses.push_back(flag_double(flag, value(flag)));
    } else if (flag == "--help") {
      inv.subcommand = "help";
    } else {
      bad_flag("unknown flag '" + flag + "'");
    }
  }
  return inv;
}

std::string usage() {
  return
      "usage: chemotax <subcommand> --config FILE [options]\n"
      "\n"
      "subcommands:\n"
      "  simulate   run the configured model; writes series.csv,\n"
      "             snapshots, metadata.cfg, result.txt\n"
      "  stability  closed-form instability threshold and dispersion\n"
      "             curves for the configured model\n"
      "  sweep      chi sweep (--chi-min/--chi-max/--chi-step);\n"
      "             writes sweep.csv with a transition estimate\n"
      "  lyapunov   kinetic-ODE Lyapunov spectrum from ic.base\n"
      "  probe      planar critical-mass dichotomy (--mass, repeatable;\n"
      "             default 0.5x and 3x the critical mass)\n"
      "\n"
      "options:\n"
      "  --config FILE    run configuration (required)\n"
      "  --output DIR     output directory (default: out)\n"
      "  --set KEY=VALUE  override a config key (repeatable)\n"
      "  --seed N         replace run.rng_seed\n"
      "  --workers N      sweep worker threads (default: CHEMOTAX_WORKERS\n"
      "                   or hardware concurrency)\n"
      "\n"
      "exit codes: 0 success (including a blow-up verdict), 1 config\n"
      "error, 2 runtime failure\n";
}

int run_cli(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.subcommand == "help" || inv.subcommand.empty()) {
    out << usage();
    return 0;
  }
  const bool known = inv.subcommand == "simulate" ||
                     inv.subcommand == "stability" ||
                     inv.subcommand == "sweep" ||
                     inv.subcommand == "lyapunov" ||
                     inv.subcommand == "probe";
  if (!known) {
    err << "config error: unknown subcommand '" << inv.subcommand << "'\n";
    return 1;
  }

  // Configuration phase: anything wrong here is the caller's input.
  RunConfig cfg;
  linstab::TuringThreshold threshold;
  std::vector<double> chis;
  std::vector<double> masses = inv.masses;
  try {
    if (inv.config_path.empty())
      throw Error(Errc::BadValue, "missing --config FILE");
    cfg = config::load_run_config(inv.config_path);
    config::apply_overrides(cfg, inv.overrides);
    if (inv.seed) cfg.rng_seed = *inv.seed;
    require_valid(cfg);
    if (inv.subcommand == "stability") {
      const SteadyState steady = homogeneous_steady_state(cfg.model);
      threshold = linstab::turing_threshold(cfg.model, steady.u.at(0));
    } else if (inv.subcommand == "sweep") {
      chis = sweep_grid(inv);
    } else if (inv.subcommand == "lyapunov") {
      if (cfg.ic.base.size() < 2)
        throw Error(Errc::BadValue,
                    "ic.base must provide the two kinetic start values");
    } else if (inv.subcommand == "probe") {
      if (cfg.grid.dim != 2)
        throw Error(Errc::BadGrid,
                    "grid.dim must be 2 for the critical-mass probe");
      if (masses.empty()) {
        const double mc = linstab::critical_mass(
            cfg.model.species.at(0).D, cfg.model.species.at(0).chi);
        masses = {0.5 * mc, 3.0 * mc};
      }
      for (const double m : masses)
        if (!(m > 0.0))
          throw Error(Errc::BadValue, "flag --mass must be positive");
    }
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  }

  // Execution phase: failures here are the run's problem.
  try {
    if (inv.subcommand == "simulate") return do_simulate(cfg, inv, out);
    if (inv.subcommand == "stability")
      return do_stability(cfg, inv, threshold, out);
    if (inv.subcommand == "sweep") return do_sweep(cfg, inv, chis, out);
    if (inv.subcommand == "lyapunov") return do_lyapunov(cfg, inv, out);
    return do_probe(cfg, inv, masses, out);
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(size_t(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  CliInvocation inv;
  try {
    inv = parse_args(args);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n" << usage();
    return 1;
  }
  return run_cli(inv, std::cout, std::cerr);
}

}  // namespace chemotax::cli
