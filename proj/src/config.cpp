#include "chemotax/config.hpp"

#include <cstdlib>
#include <map>
#include <sstream>

#include "chemotax/io.hpp"

namespace chemotax::config {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_path(const std::string& key) {
  std::vector<std::string> parts;
  std::istringstream in(key);
  std::string part;
  while (std::getline(in, part, '.')) parts.push_back(part);
  return parts;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& what) {
  throw Error(Errc::BadValue, "config key '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size())
    bad_value(key, "not a number '" + value + "'");
  return x;
}

long to_long(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long x = std::strtol(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size())
    bad_value(key, "not an integer '" + value + "'");
  return x;
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long x = std::strtoull(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size() ||
      value.front() == '-')
    bad_value(key, "not an unsigned integer '" + value + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  bad_value(key, "expected true or false, got '" + value + "'");
}

// Array index token. Paths are single-digit so that lexicographic key
// order (the parse order) matches numeric order.
size_t to_index(const std::string& key, const std::string& token) {
  if (token.size() != 1 || token[0] < '0' || token[0] > '9')
    throw Error(Errc::UnknownKey, "config key '" + key + "'");
  return size_t(token[0] - '0');
}

template <typename T>
T& at_index(std::vector<T>& vec, size_t idx, const std::string& key) {
  if (idx > vec.size())
    bad_value(key, "index skips earlier entries");
  if (idx == vec.size()) vec.emplace_back();
  return vec[idx];
}

Family to_family(const std::string& key, const std::string& value) {
  if (value == "ks_logistic") return Family::KsLogistic;
  if (value == "two_species") return Family::TwoSpecies;
  if (value == "fluid_1d") return Family::Fluid1D;
  if (value == "fluid_2d") return Family::Fluid2D;
  bad_value(key, "unknown family '" + value + "'");
}

const char* family_name(Family f) {
  switch (f) {
    case Family::KsLogistic: return "ks_logistic";
    case Family::TwoSpecies: return "two_species";
    case Family::Fluid1D: return "fluid_1d";
    case Family::Fluid2D: return "fluid_2d";
  }
  return "ks_logistic";
}

StepperKind to_stepper(const std::string& key, const std::string& value) {
  if (value == "fdm_euler") return StepperKind::FdmEuler;
  if (value == "ssfm") return StepperKind::Ssfm;
  if (value == "etdrk4") return StepperKind::Etdrk4;
  bad_value(key, "unknown stepper '" + value + "'");
}

const char* stepper_name(StepperKind k) {
  switch (k) {
    case StepperKind::FdmEuler: return "fdm_euler";
    case StepperKind::Ssfm: return "ssfm";
    case StepperKind::Etdrk4: return "etdrk4";
  }
  return "fdm_euler";
}

Boundary to_boundary(const std::string& key, const std::string& value) {
  if (value == "periodic") return Boundary::Periodic;
  if (value == "neumann") return Boundary::Neumann;
  bad_value(key, "unknown boundary '" + value + "'");
}

KineticsKind to_kinetics(const std::string& key, const std::string& value) {
  if (value == "none") return KineticsKind::None;
  if (value == "logistic") return KineticsKind::Logistic;
  if (value == "allee") return KineticsKind::Allee;
  bad_value(key, "unknown kinetics '" + value + "'");
}

InitialCondition::Kind to_ic_kind(const std::string& key,
                                  const std::string& value) {
  if (value == "uniform_plus_noise")
    return InitialCondition::Kind::UniformPlusNoise;
  if (value == "gaussian") return InitialCondition::Kind::Gaussian;
  if (value == "explicit")
    bad_value(key, "explicit initial data is not expressible in text");
  bad_value(key, "unknown initial condition '" + value + "'");
}

void set_key(RunConfig& cfg, const std::string& key,
             const std::string& value) {
  const auto parts = split_path(key);
  const auto is = [&](std::initializer_list<const char*> want) {
    if (parts.size() != want.size()) return false;
    size_t i = 0;
    for (const char* w : want)
      if (parts[i++] != w) return false;
    return true;
  };

  // grid
  if (is({"grid", "dim"})) { cfg.grid.dim = int(to_long(key, value)); return; }
  if (is({"grid", "n"})) { cfg.grid.n = int(to_long(key, value)); return; }
  if (is({"grid", "length"})) { cfg.grid.length = to_double(key, value); return; }
  if (is({"grid", "boundary"})) { cfg.grid.boundary = to_boundary(key, value); return; }

  // model scalars
  if (is({"model", "family"})) { cfg.model.family = to_family(key, value); return; }
  if (is({"model", "D_v"})) { cfg.model.D_v = to_double(key, value); return; }
  if (is({"model", "kinetics", "kind"})) { cfg.model.kinetics.kind = to_kinetics(key, value); return; }
  if (is({"model", "kinetics", "r"})) { cfg.model.kinetics.r = to_double(key, value); return; }
  if (is({"model", "kinetics", "K"})) { cfg.model.kinetics.K = to_double(key, value); return; }
  if (is({"model", "kinetics", "A"})) { cfg.model.kinetics.A = to_double(key, value); return; }
  if (is({"model", "signal", "beta"})) { cfg.model.signal.beta = to_double(key, value); return; }

  // model arrays and optional fluid block
  if (parts.size() == 4 && parts[0] == "model" && parts[1] == "species") {
    SpeciesParams& sp =
        at_index(cfg.model.species, to_index(key, parts[2]), key);
    if (parts[3] == "D") { sp.D = to_double(key, value); return; }
    if (parts[3] == "chi") { sp.chi = to_double(key, value); return; }
    throw Error(Errc::UnknownKey, "config key '" + key + "'");
  }
  if (parts.size() == 4 && parts[0] == "model" && parts[1] == "signal" &&
      parts[2] == "alpha") {
    at_index(cfg.model.signal.alpha, to_index(key, parts[3]), key) =
        to_double(key, value);
    return;
  }
  if (parts.size() == 3 && parts[0] == "model" && parts[1] == "fluid") {
    if (!cfg.model.fluid) cfg.model.fluid = FluidParams{};
    if (parts[2] == "nu") { cfg.model.fluid->nu = to_double(key, value); return; }
    if (parts[2] == "kappa") { cfg.model.fluid->kappa = to_double(key, value); return; }
    if (parts[2] == "e_g_x") { cfg.model.fluid->e_g_x = to_double(key, value); return; }
    if (parts[2] == "e_g_y") { cfg.model.fluid->e_g_y = to_double(key, value); return; }
    throw Error(Errc::UnknownKey, "config key '" + key + "'");
  }

  // run controls
  if (is({"run", "stepper"})) { cfg.stepper = to_stepper(key, value); return; }
  if (is({"run", "dt"})) { cfg.dt = to_double(key, value); return; }
  if (is({"run", "t_final"})) { cfg.t_final = to_double(key, value); return; }
  if (is({"run", "snapshot_every"})) { cfg.snapshot_every = int(to_long(key, value)); return; }
  if (is({"run", "blowup_threshold"})) { cfg.blowup_threshold = to_double(key, value); return; }
  if (is({"run", "rng_seed"})) { cfg.rng_seed = to_seed(key, value); return; }
  if (is({"run", "dealias"})) { cfg.dealias = to_bool(key, value); return; }
  if (is({"run", "record_midpoint"})) { cfg.record_midpoint = to_bool(key, value); return; }
  if (is({"run", "record_free_energy"})) { cfg.record_free_energy = to_bool(key, value); return; }
  if (is({"run", "clip", "lo"}) || is({"run", "clip", "hi"})) {
    if (!cfg.clip) cfg.clip = ClipRange{};
    (parts[2] == "lo" ? cfg.clip->lo : cfg.clip->hi) = to_double(key, value);
    return;
  }

  // initial condition
  if (is({"ic", "kind"})) { cfg.ic.kind = to_ic_kind(key, value); return; }
  if (is({"ic", "noise_amplitude"})) { cfg.ic.noise_amplitude = to_double(key, value); return; }
  if (is({"ic", "width"})) { cfg.ic.width = to_double(key, value); return; }
  if (is({"ic", "peak"})) { cfg.ic.peak = to_double(key, value); return; }
  if (is({"ic", "v_peak"})) { cfg.ic.v_peak = to_double(key, value); return; }
  if (parts.size() == 3 && parts[0] == "ic" && parts[1] == "base") {
    at_index(cfg.ic.base, to_index(key, parts[2]), key) =
        to_double(key, value);
    return;
  }
  if (parts.size() == 3 && parts[0] == "ic" && parts[1] == "center") {
    at_index(cfg.ic.center, to_index(key, parts[2]), key) =
        to_double(key, value);
    return;
  }

  throw Error(Errc::UnknownKey, "config key '" + key + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::string prefix;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw Error(Errc::BadValue, "config line " + std::to_string(lineno) +
                                        ": malformed section header");
      prefix = trim(line.substr(1, line.size() - 2));
      if (prefix.empty())
        throw Error(Errc::BadValue, "config line " + std::to_string(lineno) +
                                        ": empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::BadValue, "config line " + std::to_string(lineno) +
                                      ": expected key = value");
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (k.empty())
      throw Error(Errc::BadValue, "config line " + std::to_string(lineno) +
                                      ": empty key");
    const std::string full = prefix.empty() ? k : prefix + "." + k;
    if (entries.count(full))
      throw Error(Errc::BadValue,
                  "config key '" + full + "' assigned twice");
    entries.emplace(full, v);
  }

  for (const char* req :
       {"grid.n", "grid.length", "model.family", "run.dt", "run.t_final"})
    if (!entries.count(req))
      throw Error(Errc::BadValue,
                  std::string("missing required key '") + req + "'");

  RunConfig cfg;
  // Lexicographic map order visits array entries in index order, so
  // grow-on-demand vectors fill contiguously.
  for (const auto& [key, value] : entries) set_key(cfg, key, value);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return parse_run_config(read_file(path));
}

std::string run_config_text(const RunConfig& cfg) {
  if (cfg.ic.kind == InitialCondition::Kind::Explicit)
    throw Error(Errc::BadState,
                "ic.kind: explicit initial data is not expressible as text");
  std::ostringstream out;
  const auto kv = [&out](const char* key, const std::string& value) {
    out << key << " = " << value << "\n";
  };
  const auto kvi = [&out](const std::string& key, const std::string& value) {
    out << key << " = " << value << "\n";
  };
  const auto onoff = [](bool b) { return std::string(b ? "true" : "false"); };

  out << "[grid]\n";
  kv("dim", std::to_string(cfg.grid.dim));
  kv("n", std::to_string(cfg.grid.n));
  kv("length", format_double(cfg.grid.length));
  kv("boundary",
     cfg.grid.boundary == Boundary::Periodic ? "periodic" : "neumann");

  out << "\n[model]\n";
  kv("family", family_name(cfg.model.family));
  kv("D_v", format_double(cfg.model.D_v));
  for (size_t i = 0; i < cfg.model.species.size(); ++i) {
    out << "\n[model.species." << i << "]\n";
    kv("D", format_double(cfg.model.species[i].D));
    kv("chi", format_double(cfg.model.species[i].chi));
  }
  out << "\n[model.kinetics]\n";
  switch (cfg.model.kinetics.kind) {
    case KineticsKind::None:
      kv("kind", "none");
      break;
    case KineticsKind::Logistic:
      kv("kind", "logistic");
      kv("r", format_double(cfg.model.kinetics.r));
      kv("K", format_double(cfg.model.kinetics.K));
      break;
    case KineticsKind::Allee:
      kv("kind", "allee");
      kv("r", format_double(cfg.model.kinetics.r));
      kv("K", format_double(cfg.model.kinetics.K));
      kv("A", format_double(cfg.model.kinetics.A));
      break;
  }
  out << "\n[model.signal]\n";
  for (size_t i = 0; i < cfg.model.signal.alpha.size(); ++i)
    kvi("alpha." + std::to_string(i), format_double(cfg.model.signal.alpha[i]));
  kv("beta", format_double(cfg.model.signal.beta));
  if (cfg.model.fluid) {
    out << "\n[model.fluid]\n";
    kv("nu", format_double(cfg.model.fluid->nu));
    kv("kappa", format_double(cfg.model.fluid->kappa));
    kv("e_g_x", format_double(cfg.model.fluid->e_g_x));
    kv("e_g_y", format_double(cfg.model.fluid->e_g_y));
  }

  out << "\n[run]\n";
  kv("stepper", stepper_name(cfg.stepper));
  kv("dt", format_double(cfg.dt));
  kv("t_final", format_double(cfg.t_final));
  kv("snapshot_every", std::to_string(cfg.snapshot_every));
  kv("blowup_threshold", format_double(cfg.blowup_threshold));
  kv("rng_seed", std::to_string(cfg.rng_seed));
  if (cfg.dealias) kv("dealias", onoff(*cfg.dealias));
  kv("record_midpoint", onoff(cfg.record_midpoint));
  kv("record_free_energy", onoff(cfg.record_free_energy));
  if (cfg.clip) {
    kv("clip.lo", format_double(cfg.clip->lo));
    kv("clip.hi", format_double(cfg.clip->hi));
  }

  out << "\n[ic]\n";
  if (cfg.ic.kind == InitialCondition::Kind::UniformPlusNoise) {
    kv("kind", "uniform_plus_noise");
    for (size_t i = 0; i < cfg.ic.base.size(); ++i)
      kvi("base." + std::to_string(i), format_double(cfg.ic.base[i]));
  } else {
    kv("kind", "gaussian");
    for (size_t i = 0; i < cfg.ic.center.size(); ++i)
      kvi("center." + std::to_string(i), format_double(cfg.ic.center[i]));
    kv("width", format_double(cfg.ic.width));
    kv("peak", format_double(cfg.ic.peak));
    kv("v_peak", format_double(cfg.ic.v_peak));
  }
  kv("noise_amplitude", format_double(cfg.ic.noise_amplitude));
  return out.str();
}

void apply_overrides(RunConfig& cfg,
                     const std::vector<std::string>& overrides) {
  for (const std::string& entry : overrides) {
    const size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::BadValue,
                  "override '" + entry + "' is not key=value");
    const std::string key = trim(entry.substr(0, eq));
    const std::string value = trim(entry.substr(eq + 1));
    if (key.empty())
      throw Error(Errc::BadValue,
                  "override '" + entry + "' is not key=value");
    set_key(cfg, key, value);
  }
}

}  // namespace chemotax::config
