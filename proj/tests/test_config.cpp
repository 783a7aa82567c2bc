#include "doctest.h"

#include <cmath>
#include <string>

#include "chemotax/config.hpp"
#include "test_support.hpp"

using namespace chemotax;

namespace {

const char* kFullConfig = R"(# reference logistic run on a plane
[grid]
dim = 2
n = 64
length = 5.0
boundary = periodic

[model]
family = ks_logistic
D_v = 0.1

[model.species.0]
D = 0.1
chi = 1.5

[model.kinetics]
kind = logistic
r = 0.5
K = 1.0

[model.signal]
alpha.0 = 1.0
beta = 0.5

[run]
stepper = etdrk4
dt = 2e-4          # keeps the nonlinear update stable
t_final = 0.01
snapshot_every = 10
blowup_threshold = 1e6
rng_seed = 42
dealias = false
record_midpoint = true
record_free_energy = true
clip.lo = 0.0
clip.hi = 2.0

[ic]
kind = uniform_plus_noise
base.0 = 1.0
base.1 = 2.0
noise_amplitude = 0.01
)";

}  // namespace

TEST_SUITE_BEGIN("config");

TEST_CASE("a full config file parses into the matching run config") {
  const RunConfig cfg = config::parse_run_config(kFullConfig);
  CHECK(cfg.grid.dim == 2);
  CHECK(cfg.grid.n == 64);
  CHECK(cfg.grid.length == 5.0);
  CHECK(cfg.grid.boundary == Boundary::Periodic);
  CHECK(cfg.model.family == Family::KsLogistic);
  REQUIRE(cfg.model.species.size() == 1);
  CHECK(cfg.model.species[0].D == 0.1);
  CHECK(cfg.model.species[0].chi == 1.5);
  CHECK(cfg.model.D_v == 0.1);
  CHECK(cfg.model.kinetics.kind == KineticsKind::Logistic);
  CHECK(cfg.model.kinetics.r == 0.5);
  CHECK(cfg.model.kinetics.K == 1.0);
  REQUIRE(cfg.model.signal.alpha.size() == 1);
  CHECK(cfg.model.signal.alpha[0] == 1.0);
  CHECK(cfg.model.signal.beta == 0.5);
  CHECK(!cfg.model.fluid.has_value());
  CHECK(cfg.stepper == StepperKind::Etdrk4);
  CHECK(cfg.dt == 2e-4);
  CHECK(cfg.t_final == 0.01);
  CHECK(cfg.snapshot_every == 10);
  CHECK(cfg.blowup_threshold == 1e6);
  CHECK(cfg.rng_seed == 42);
  REQUIRE(cfg.dealias.has_value());
  CHECK(*cfg.dealias == false);
  CHECK(cfg.record_midpoint);
  CHECK(cfg.record_free_energy);
  REQUIRE(cfg.clip.has_value());
  CHECK(cfg.clip->lo == 0.0);
  CHECK(cfg.clip->hi == 2.0);
  CHECK(cfg.ic.kind == InitialCondition::Kind::UniformPlusNoise);
  REQUIRE(cfg.ic.base.size() == 2);
  CHECK(cfg.ic.base[0] == 1.0);
  CHECK(cfg.ic.base[1] == 2.0);
  CHECK(cfg.ic.noise_amplitude == 0.01);
  // The parsed config is a valid run.
  CHECK(validate(cfg).ok());
}

TEST_CASE("sections are cosmetic prefixes") {
  const char* flat = R"(
grid.n = 64
grid.length = 5.0
model.family = ks_logistic
model.species.0.D = 0.1
model.species.0.chi = 0.2
model.D_v = 0.1
model.kinetics.kind = logistic
model.kinetics.r = 0.5
model.kinetics.K = 1.0
model.signal.alpha.0 = 1.0
model.signal.beta = 0.5
run.stepper = ssfm
run.dt = 1e-3
run.t_final = 0.1
ic.base.0 = 1.0
ic.base.1 = 2.0
)";
  const char* sectioned = R"(
[grid]
n = 64
length = 5.0
[model]
family = ks_logistic
D_v = 0.1
[model.species.0]
D = 0.1
chi = 0.2
[model.kinetics]
kind = logistic
r = 0.5
K = 1.0
[model.signal]
alpha.0 = 1.0
beta = 0.5
[run]
stepper = ssfm
dt = 1e-3
t_final = 0.1
[ic]
base.0 = 1.0
base.1 = 2.0
)";
  const RunConfig a = config::parse_run_config(flat);
  const RunConfig b = config::parse_run_config(sectioned);
  CHECK(config::run_config_text(a) == config::run_config_text(b));
  CHECK(a.grid.dim == 1);  // defaulted
  CHECK(a.stepper == StepperKind::Ssfm);
}

TEST_CASE("unknown keys are rejected with their full path") {
  const std::string base =
      "grid.n = 64\ngrid.length = 5.0\nmodel.family = ks_logistic\n"
      "run.dt = 1e-3\nrun.t_final = 0.1\n";
  SUBCASE("top level") {
    try {
      config::parse_run_config(base + "grid.nx = 3\n");
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownKey);
      CHECK(std::string(e.what()).find("grid.nx") != std::string::npos);
    }
  }
  SUBCASE("inside a section") {
    try {
      config::parse_run_config(base + "[model]\nspeed = 3\n");
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownKey);
      CHECK(std::string(e.what()).find("model.speed") != std::string::npos);
    }
  }
}

TEST_CASE("malformed input names the offending key or line") {
  const std::string base =
      "grid.n = 64\ngrid.length = 5.0\nmodel.family = ks_logistic\n";
  auto expect_message = [](const std::string& text, const char* needle) {
    try {
      config::parse_run_config(text);
      FAIL_CHECK("expected a throw for ", needle);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_message(base + "run.dt = abc\nrun.t_final = 1\n", "run.dt");
  expect_message(base + "run.dt = 1e-3\nrun.t_final = 1\ngrid.dim = 2.5\n",
                 "grid.dim");
  expect_message(
      base + "run.dt = 1e-3\nrun.t_final = 1\nrun.stepper = rk4\n",
      "run.stepper");
  expect_message(
      base + "run.dt = 1e-3\nrun.t_final = 1\nrun.record_midpoint = yep\n",
      "run.record_midpoint");
  expect_message(base + "run.dt = 1e-3\nrun.t_final = 1\nnonsense\n",
                 "line 6");
  // Duplicate assignments are ambiguous, not last-wins.
  expect_message(base + "run.dt = 1e-3\nrun.dt = 2e-3\nrun.t_final = 1\n",
                 "run.dt");
}

TEST_CASE("missing required keys are named") {
  auto missing = [](const std::string& text, const char* needle) {
    try {
      config::parse_run_config(text);
      FAIL_CHECK("expected a throw for ", needle);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  missing("grid.n = 64\ngrid.length = 5\nmodel.family = ks_logistic\n"
          "run.t_final = 1\n",
          "run.dt");
  missing("grid.n = 64\ngrid.length = 5\nrun.dt = 1e-3\nrun.t_final = 1\n",
          "model.family");
  missing("", "grid.n");
}

TEST_CASE("serialization round trip is bitwise") {
  SUBCASE("reference config") {
    RunConfig cfg = testsup::reference_run_config(0.1);
    // Awkward doubles that expose any lossy formatting.
    cfg.dt = 1e-3 * (1.0 + std::pow(2.0, -40));
    cfg.model.species[0].chi = std::nextafter(0.2, 1.0);
    cfg.rng_seed = 0xDEADBEEFCAFEULL;
    const std::string text = config::run_config_text(cfg);
    const RunConfig back = config::parse_run_config(text);
    CHECK(back.dt == cfg.dt);
    CHECK(back.model.species[0].chi == cfg.model.species[0].chi);
    CHECK(back.rng_seed == cfg.rng_seed);
    CHECK(back.t_final == cfg.t_final);
    CHECK(back.ic.base == cfg.ic.base);
    CHECK(back.ic.noise_amplitude == cfg.ic.noise_amplitude);
    CHECK(config::run_config_text(back) == text);
  }
  SUBCASE("fluid config with clip and explicit dealias") {
    RunConfig cfg;
    cfg.grid = {2, 128, 6.0, Boundary::Periodic};
    cfg.model.family = Family::Fluid2D;
    cfg.model.species = {{0.1, 1.0}};
    cfg.model.D_v = 0.1;
    cfg.model.kinetics = {KineticsKind::Logistic, 1.0, 1.0, 0.0};
    cfg.model.signal.alpha = {1.0};
    cfg.model.signal.beta = 1.0;
    cfg.model.fluid = FluidParams{0.1, 1.0, 0.0, -1.0};
    cfg.stepper = StepperKind::Etdrk4;
    cfg.dt = 0.01;
    cfg.t_final = 0.5;
    cfg.snapshot_every = 5;
    cfg.dealias = true;
    cfg.clip = ClipRange{0.0, 10.0};
    cfg.ic.base = {1.0, 1.0, 0.0};
    cfg.ic.noise_amplitude = 0.05;
    cfg.rng_seed = 3;
    const std::string text = config::run_config_text(cfg);
    const RunConfig back = config::parse_run_config(text);
    REQUIRE(back.model.fluid.has_value());
    CHECK(back.model.fluid->nu == 0.1);
    CHECK(back.model.fluid->kappa == 1.0);
    CHECK(back.model.fluid->e_g_y == -1.0);
    REQUIRE(back.clip.has_value());
    CHECK(back.clip->hi == 10.0);
    REQUIRE(back.dealias.has_value());
    CHECK(*back.dealias == true);
    CHECK(config::run_config_text(back) == text);
  }
  SUBCASE("gaussian initial condition") {
    RunConfig cfg = testsup::reference_run_config(0.1);
    cfg.ic.kind = InitialCondition::Kind::Gaussian;
    cfg.ic.base.clear();
    cfg.ic.noise_amplitude = 0.0;
    cfg.ic.center = {2.5};
    cfg.ic.width = 0.3;
    cfg.ic.peak = 3.0;
    cfg.ic.v_peak = 0.2;
    const std::string text = config::run_config_text(cfg);
    const RunConfig back = config::parse_run_config(text);
    CHECK(back.ic.kind == InitialCondition::Kind::Gaussian);
    CHECK(back.ic.center == cfg.ic.center);
    CHECK(back.ic.width == 0.3);
    CHECK(back.ic.peak == 3.0);
    CHECK(back.ic.v_peak == 0.2);
    CHECK(config::run_config_text(back) == text);
  }
  SUBCASE("unset optional flags stay unset") {
    const RunConfig cfg = testsup::reference_run_config(0.1);
    REQUIRE(!cfg.dealias.has_value());
    REQUIRE(!cfg.clip.has_value());
    const RunConfig back =
        config::parse_run_config(config::run_config_text(cfg));
    CHECK(!back.dealias.has_value());
    CHECK(!back.clip.has_value());
  }
}

TEST_CASE("explicit initial data is not expressible as text") {
  RunConfig cfg = testsup::reference_run_config(0.1);
  cfg.ic.kind = InitialCondition::Kind::Explicit;
  cfg.ic.fields = {std::vector<double>(64, 1.0),
                   std::vector<double>(64, 2.0)};
  CHECK_THROWS_AS((void)config::run_config_text(cfg), Error);
  const std::string bad =
      "grid.n = 64\ngrid.length = 5\nmodel.family = ks_logistic\n"
      "run.dt = 1e-3\nrun.t_final = 1\nic.kind = explicit\n";
  CHECK_THROWS_AS((void)config::parse_run_config(bad), Error);
}

TEST_CASE("overrides update dotted paths") {
  RunConfig cfg = testsup::reference_run_config(0.1);
  SUBCASE("values and growth") {
    config::apply_overrides(
        cfg, {"model.species.0.chi=2.0", "run.dt=5e-4", "run.rng_seed=9"});
    CHECK(cfg.model.species[0].chi == 2.0);
    CHECK(cfg.dt == 5e-4);
    CHECK(cfg.rng_seed == 9);
    // Appending a second production coefficient grows the array.
    config::apply_overrides(cfg, {"model.signal.alpha.1=0.5"});
    REQUIRE(cfg.model.signal.alpha.size() == 2);
    CHECK(cfg.model.signal.alpha[1] == 0.5);
  }
  SUBCASE("empty list is the identity") {
    const std::string before = config::run_config_text(cfg);
    config::apply_overrides(cfg, {});
    CHECK(config::run_config_text(cfg) == before);
  }
  SUBCASE("unknown path carries the full key") {
    try {
      config::apply_overrides(cfg, {"model.species.0.chii=2"});
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::UnknownKey);
      CHECK(std::string(e.what()).find("model.species.0.chii") !=
            std::string::npos);
    }
  }
  SUBCASE("missing equals sign") {
    CHECK_THROWS_AS(config::apply_overrides(cfg, {"run.dt"}), Error);
  }
  SUBCASE("index gaps are rejected") {
    CHECK_THROWS_AS(
        config::apply_overrides(cfg, {"model.signal.alpha.3=1.0"}), Error);
  }
}

TEST_CASE("parsed overrides reproduce a hand-edited config") {
  // Override-then-serialize equals editing the file directly.
  RunConfig a = config::parse_run_config(kFullConfig);
  config::apply_overrides(a, {"model.species.0.chi=0.7"});
  std::string edited = kFullConfig;
  edited.replace(edited.find("chi = 1.5"), 9, "chi = 0.7");
  const RunConfig b = config::parse_run_config(edited);
  CHECK(config::run_config_text(a) == config::run_config_text(b));
}

TEST_CASE("shipped example configs parse, validate, and round-trip") {
  const char* names[] = {"keller_segel_2d", "two_species_2d", "fluid_1d_sweep",
                         "fluid_2d", "lyapunov"};
  for (const char* name : names) {
    CAPTURE(name);
    const std::string path =
        std::string(CHEMOTAX_CONFIG_DIR) + "/" + name + ".cfg";
    const RunConfig cfg = config::load_run_config(path);
    CHECK(validate(cfg).ok());
    CHECK(config::run_config_text(config::parse_run_config(
              config::run_config_text(cfg))) == config::run_config_text(cfg));
  }
}

TEST_SUITE_END();
