#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "chemotax/cli.hpp"
#include "chemotax/config.hpp"
#include "chemotax/io.hpp"
#include "chemotax/linstab.hpp"
#include "test_support.hpp"

using namespace chemotax;

namespace {

struct TmpDir {
  std::string path;
  TmpDir() {
    char buf[] = "/tmp/chemotax_cli_XXXXXX";
    path = ::mkdtemp(buf);
  }
  ~TmpDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return path + "/" + name;
  }
};

bool file_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

// Short valid run on the reference system, serialized to a file.
std::string write_reference_config(const TmpDir& dir, double chi,
                                   double t_final = 0.01) {
  RunConfig cfg = testsup::reference_run_config(chi);
  cfg.t_final = t_final;
  cfg.snapshot_every = 5;
  const std::string path = dir.file("run.cfg");
  atomic_write(path, config::run_config_text(cfg));
  return path;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(const cli::CliInvocation& inv) {
  std::ostringstream out, err;
  const int code = cli::run_cli(inv, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("argument parsing covers every flag") {
  const cli::CliInvocation inv = cli::parse_args(
      {"sweep", "--config", "a.cfg", "--output", "o", "--set",
       "run.dt=1e-3", "--set", "model.D_v=0.2", "--workers", "4", "--seed",
       "7", "--chi-min", "0", "--chi-max", "1", "--chi-step", "0.5",
       "--mass", "2.5", "--mass", "10"});
  CHECK(inv.subcommand == "sweep");
  CHECK(inv.config_path == "a.cfg");
  CHECK(inv.output_dir == "o");
  REQUIRE(inv.overrides.size() == 2);
  CHECK(inv.overrides[1] == "model.D_v=0.2");
  CHECK(inv.workers == 4);
  REQUIRE(inv.seed.has_value());
  CHECK(*inv.seed == 7);
  CHECK(inv.chi_min == 0.0);
  CHECK(inv.chi_max == 1.0);
  CHECK(inv.chi_step == 0.5);
  REQUIRE(inv.masses.size() == 2);
  CHECK(inv.masses[1] == 10.0);

  CHECK(cli::parse_args({}).subcommand == "help");
  CHECK(cli::parse_args({"--help"}).subcommand == "help");
  CHECK_THROWS_AS(cli::parse_args({"simulate", "--nope"}), Error);
  CHECK_THROWS_AS(cli::parse_args({"simulate", "--config"}), Error);
  CHECK_THROWS_AS(cli::parse_args({"simulate", "--workers", "x"}), Error);
}

TEST_CASE("help exits zero") {
  const auto res = invoke(cli::parse_args({}));
  CHECK(res.code == 0);
  CHECK(res.out.find("subcommands") != std::string::npos);
}

TEST_CASE("simulate writes the full output set") {
  TmpDir dir;
  cli::CliInvocation inv;
  inv.subcommand = "simulate";
  inv.config_path = write_reference_config(dir, 0.1);
  inv.output_dir = dir.file("out");
  const auto res = invoke(inv);
  CHECK(res.code == 0);
  CHECK(res.err.empty());
  CHECK(res.out.find("completed") != std::string::npos);

  CHECK(file_exists(inv.output_dir + "/metadata.cfg"));
  CHECK(file_exists(inv.output_dir + "/series.csv"));
  CHECK(file_exists(inv.output_dir + "/result.txt"));
  CHECK(file_exists(inv.output_dir + "/manifest.txt"));
  // 10 steps, cadence 5: snapshots at t = 0, 0.005, 0.01 for u and v.
  CHECK(file_exists(inv.output_dir + "/snap_000_u.csv"));
  CHECK(file_exists(inv.output_dir + "/snap_001_u.csv"));
  CHECK(file_exists(inv.output_dir + "/snap_002_v.csv"));
  CHECK(!file_exists(inv.output_dir + "/snap_003_u.csv"));

  const std::string series = read_file(inv.output_dir + "/series.csv");
  CHECK(series.rfind("t,mass_1,sup_u,entropy,second_moment\n", 0) == 0);
  const std::string result = read_file(inv.output_dir + "/result.txt");
  CHECK(result.find("termination = completed") != std::string::npos);
  const std::string manifest = read_file(inv.output_dir + "/manifest.txt");
  CHECK(manifest.find("series.csv") != std::string::npos);
  // Metadata re-parses into a valid config.
  const RunConfig meta =
      config::load_run_config(inv.output_dir + "/metadata.cfg");
  CHECK(validate(meta).ok());
}

TEST_CASE("exit codes separate config from runtime failures") {
  TmpDir dir;
  cli::CliInvocation inv;
  inv.subcommand = "simulate";
  inv.output_dir = dir.file("out");

  SUBCASE("missing config file names the path") {
    inv.config_path = dir.file("absent.cfg");
    const auto res = invoke(inv);
    CHECK(res.code == 1);
    CHECK(res.err.find("absent.cfg") != std::string::npos);
  }
  SUBCASE("unknown key in the file is named") {
    inv.config_path = dir.file("bad.cfg");
    atomic_write(inv.config_path,
                 "grid.n = 64\ngrid.length = 5\nmodel.family = "
                 "ks_logistic\nrun.dt = 1e-3\nrun.t_final = 1\ngrid.nx = "
                 "3\n");
    const auto res = invoke(inv);
    CHECK(res.code == 1);
    CHECK(res.err.find("grid.nx") != std::string::npos);
  }
  SUBCASE("semantic violations are config errors") {
    inv.config_path = write_reference_config(dir, 0.1);
    inv.overrides = {"run.dt=0"};
    const auto res = invoke(inv);
    CHECK(res.code == 1);
    CHECK(res.err.find("run.dt") != std::string::npos);
  }
  SUBCASE("bad override path is named") {
    inv.config_path = write_reference_config(dir, 0.1);
    inv.overrides = {"model.speed=3"};
    const auto res = invoke(inv);
    CHECK(res.code == 1);
    CHECK(res.err.find("model.speed") != std::string::npos);
  }
  SUBCASE("missing --config") {
    const auto res = invoke(inv);
    CHECK(res.code == 1);
  }
  SUBCASE("unknown subcommand") {
    inv.subcommand = "paint";
    inv.config_path = write_reference_config(dir, 0.1);
    const auto res = invoke(inv);
    CHECK(res.code == 1);
    CHECK(res.err.find("paint") != std::string::npos);
  }
}

TEST_CASE("blow-up is a result, not a failure") {
  TmpDir dir;
  RunConfig cfg = testsup::reference_run_config(5.0);
  cfg.dt = 2.5e-4;
  cfg.t_final = 2.0;
  cfg.blowup_threshold = 2.5;
  cfg.snapshot_every = 1000;
  const std::string path = dir.file("hot.cfg");
  atomic_write(path, config::run_config_text(cfg));

  cli::CliInvocation inv;
  inv.subcommand = "simulate";
  inv.config_path = path;
  inv.output_dir = dir.file("out");
  const auto res = invoke(inv);
  CHECK(res.code == 0);
  const std::string result = read_file(inv.output_dir + "/result.txt");
  CHECK(result.find("termination = blowup") != std::string::npos);
}

TEST_CASE("metadata reproduces the run bitwise") {
  TmpDir dir;
  cli::CliInvocation first;
  first.subcommand = "simulate";
  first.config_path = write_reference_config(dir, 0.1);
  first.output_dir = dir.file("one");
  REQUIRE(invoke(first).code == 0);

  cli::CliInvocation second;
  second.subcommand = "simulate";
  second.config_path = first.output_dir + "/metadata.cfg";
  second.output_dir = dir.file("two");
  REQUIRE(invoke(second).code == 0);

  CHECK(read_file(first.output_dir + "/series.csv") ==
        read_file(second.output_dir + "/series.csv"));
  CHECK(read_file(first.output_dir + "/snap_002_u.csv") ==
        read_file(second.output_dir + "/snap_002_u.csv"));

  // A different seed is a different run.
  cli::CliInvocation reseeded = second;
  reseeded.output_dir = dir.file("three");
  reseeded.seed = 99;
  REQUIRE(invoke(reseeded).code == 0);
  CHECK(read_file(first.output_dir + "/series.csv") !=
        read_file(reseeded.output_dir + "/series.csv"));
}

TEST_CASE("stability prints the frozen thresholds") {
  TmpDir dir;
  cli::CliInvocation inv;
  inv.subcommand = "stability";
  inv.config_path = write_reference_config(dir, 1.5);
  inv.output_dir = dir.file("out");
  const auto res = invoke(inv);
  CHECK(res.code == 0);
  CHECK(res.out.find("chi_crit = 0.2") != std::string::npos);
  CHECK(res.out.find("k_c^2 = 5") != std::string::npos);
  CHECK(res.out.find("supercritical") != std::string::npos);
  CHECK(file_exists(inv.output_dir + "/dispersion.csv"));
  const std::string csv = read_file(inv.output_dir + "/dispersion.csv");
  CHECK(csv.rfind("chi,k,re_lambda,im_lambda,re_simplified\n", 0) == 0);

  cli::CliInvocation sub = inv;
  sub.config_path = write_reference_config(dir, 0.1);
  sub.output_dir = dir.file("sub");
  const auto res_sub = invoke(sub);
  CHECK(res_sub.code == 0);
  CHECK(res_sub.out.find("subcritical") != std::string::npos);
}

TEST_CASE("sweep writes the csv and reports the transition") {
  TmpDir dir;
  cli::CliInvocation inv;
  inv.subcommand = "sweep";
  inv.config_path = write_reference_config(dir, 0.0, 0.05);
  inv.output_dir = dir.file("out");
  inv.workers = 2;
  inv.chi_min = 0.0;
  inv.chi_max = 0.1;
  inv.chi_step = 0.05;
  const auto res = invoke(inv);
  CHECK(res.code == 0);
  CHECK(res.out.find("transition") != std::string::npos);
  const std::string csv = read_file(inv.output_dir + "/sweep.csv");
  CHECK(csv.rfind("chi,max_u,max_v,max_w,terminated_early\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  const std::string result = read_file(inv.output_dir + "/result.txt");
  CHECK(result.find("transition = none") != std::string::npos);

  SUBCASE("a degenerate grid is a config error") {
    inv.chi_step = -1.0;
    CHECK(invoke(inv).code == 1);
  }
}

TEST_CASE("lyapunov reports the contracting reference pair") {
  TmpDir dir;
  RunConfig cfg = testsup::reference_run_config(0.0);
  cfg.model.kinetics = {KineticsKind::Logistic, 1.0, 1.0, 0.0};
  cfg.model.signal.alpha = {1.0};
  cfg.model.signal.beta = 1.0;
  cfg.dt = 1e-2;
  cfg.t_final = 200.0;
  cfg.ic.base = {1.5, 0.5};
  const std::string path = dir.file("ly.cfg");
  atomic_write(path, config::run_config_text(cfg));

  cli::CliInvocation inv;
  inv.subcommand = "lyapunov";
  inv.config_path = path;
  inv.output_dir = dir.file("out");
  const auto res = invoke(inv);
  CHECK(res.code == 0);
  CHECK(res.out.find("d_ky = 0") != std::string::npos);
  const std::string csv = read_file(inv.output_dir + "/lyapunov.csv");
  CHECK(csv.rfind("t,le1,le2,d_ky\n", 0) == 0);
  const std::string result = read_file(inv.output_dir + "/result.txt");
  CHECK(result.find("lambda_1") != std::string::npos);
}

TEST_CASE("probe defaults to the dichotomy multiples") {
  TmpDir dir;
  RunConfig cfg;
  cfg.grid = {2, 48, 8.0, Boundary::Neumann};
  cfg.model.family = Family::KsLogistic;
  cfg.model.species = {{1.0, 1.0}};
  cfg.model.D_v = 1.0;
  cfg.model.signal.alpha = {1.0};
  cfg.model.signal.beta = 1.0;
  cfg.stepper = StepperKind::FdmEuler;
  cfg.dt = 1e-4;
  cfg.t_final = 0.4;
  cfg.ic.base = {1.0, 0.0};
  const std::string path = dir.file("probe.cfg");
  atomic_write(path, config::run_config_text(cfg));

  cli::CliInvocation inv;
  inv.subcommand = "probe";
  inv.config_path = path;
  inv.output_dir = dir.file("out");
  const auto res = invoke(inv);
  CHECK(res.code == 0);
  const std::string csv = read_file(inv.output_dir + "/probe.csv");
  CHECK(csv.rfind("mass,verdict\n", 0) == 0);
  const auto nl = std::count(csv.begin(), csv.end(), '\n');
  CHECK(nl == 3);  // header + one row per default mass multiple
  CHECK(csv.find("completed") != std::string::npos);
  CHECK(csv.find("blowup") != std::string::npos);
  // The default multiples bracket M_c = 8 pi D / chi.
  const double mc = linstab::critical_mass(1.0, 1.0);
  CHECK(res.out.find(format_double(0.5 * mc)) != std::string::npos);

  SUBCASE("a line grid is a config error") {
    RunConfig line = cfg;
    line.grid = {1, 64, 8.0, Boundary::Neumann};
    atomic_write(path, config::run_config_text(line));
    const auto bad = invoke(inv);
    CHECK(bad.code == 1);
  }
}

TEST_SUITE_END();
