#include "chemotax/core.hpp"

#include <cmath>

namespace chemotax {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::BadGrid: return "BadGrid";
    case Errc::NonPositiveDiffusion: return "NonPositiveDiffusion";
    case Errc::UnsupportedBoundary: return "UnsupportedBoundary";
    case Errc::MissingKinetics: return "MissingKinetics";
    case Errc::NotWellMixedStable: return "NotWellMixedStable";
    case Errc::NonPositiveChi: return "NonPositiveChi";
    case Errc::BadValue: return "BadValue";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::BadState: return "BadState";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

int species_count(const ModelSpec& model) {
  return model.family == Family::TwoSpecies ? 2 : 1;
}

bool has_flow_field(const ModelSpec& model) {
  return model.family == Family::Fluid1D || model.family == Family::Fluid2D;
}

int field_count(const ModelSpec& model) {
  return species_count(model) + 1 + (has_flow_field(model) ? 1 : 0);
}

std::vector<std::string> field_names(const ModelSpec& model) {
  std::vector<std::string> names;
  if (species_count(model) == 1) {
    names.push_back("u");
  } else {
    names.push_back("u1");
    names.push_back("u2");
  }
  names.push_back("v");
  if (has_flow_field(model)) names.push_back("w");
  return names;
}

double Grid::dx() const {
  if (boundary == Boundary::Periodic) return length / n;
  return length / (n - 1);
}

int Grid::points() const {
  int p = n;
  for (int d = 1; d < dim; ++d) p *= n;
  return p;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim; ++d) v *= dx();
  return v;
}

double Grid::coord(int i) const { return i * dx(); }

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double Field::sup_abs() const {
  double m = 0.0;
  for (double x : data) {
    if (std::isnan(x)) return x;
    double a = std::fabs(x);
    if (a > m) m = a;
  }
  return m;
}

bool Field::finite() const {
  for (double x : data)
    if (!std::isfinite(x)) return false;
  return true;
}

Field make_field(const Grid& grid) {
  return grid.dim == 1 ? Field(grid.n, 1) : Field(grid.n, grid.n);
}

bool State::finite() const {
  for (const Field& f : fields)
    if (!f.finite()) return false;
  return true;
}

State make_state(const ModelSpec& model, const Grid& grid) {
  State s;
  s.n_species = species_count(model);
  s.flow = has_flow_field(model);
  s.fields.assign(size_t(field_count(model)), make_field(grid));
  return s;
}

std::string ValidationReport::to_string() const {
  std::string out;
  for (const Violation& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.field + ": " + v.reason;
  }
  return out;
}

namespace {

void check_model(const ModelSpec& m, const Grid& grid, StepperKind stepper,
                 std::vector<Violation>& out) {
  const int want_species = species_count(m);
  if (int(m.species.size()) != want_species) {
    out.push_back({"model.species",
                   "family needs exactly " + std::to_string(want_species) +
                       " species entries, got " +
                       std::to_string(m.species.size())});
    return;  // remaining checks index into species
  }
  for (size_t i = 0; i < m.species.size(); ++i) {
    const std::string p = "model.species." + std::to_string(i);
    if (!(m.species[i].D > 0))
      out.push_back({p + ".D", "diffusivity must be > 0"});
    if (!std::isfinite(m.species[i].chi))
      out.push_back({p + ".chi", "must be finite"});
  }
  if (!(m.D_v > 0)) out.push_back({"model.D_v", "diffusivity must be > 0"});

  if (int(m.signal.alpha.size()) != want_species) {
    out.push_back({"model.signal.alpha",
                   "needs one production rate per species"});
  } else {
    bool any_alpha = false;
    for (size_t i = 0; i < m.signal.alpha.size(); ++i) {
      if (m.signal.alpha[i] < 0)
        out.push_back({"model.signal.alpha." + std::to_string(i),
                       "must be >= 0"});
      if (m.signal.alpha[i] > 0) any_alpha = true;
    }
    bool any_chi = false;
    for (const auto& sp : m.species)
      if (sp.chi != 0.0) any_chi = true;
    if (any_chi && !any_alpha)
      out.push_back({"model.signal.alpha",
                     "chemotaxis is on but no species produces the chemical"});
  }
  if (m.signal.beta < 0) out.push_back({"model.signal.beta", "must be >= 0"});

  switch (m.kinetics.kind) {
    case KineticsKind::None:
      break;
    case KineticsKind::Logistic:
      if (!(m.kinetics.r > 0)) out.push_back({"model.kinetics.r", "must be > 0"});
      if (!(m.kinetics.K > 0)) out.push_back({"model.kinetics.K", "must be > 0"});
      break;
    case KineticsKind::Allee:
      if (!(m.kinetics.r > 0)) out.push_back({"model.kinetics.r", "must be > 0"});
      if (!(m.kinetics.K > 0)) out.push_back({"model.kinetics.K", "must be > 0"});
      if (!(m.kinetics.A > 0 && m.kinetics.A < m.kinetics.K))
        out.push_back({"model.kinetics.A", "needs 0 < A < K"});
      break;
  }
  if (m.family == Family::TwoSpecies && m.kinetics.kind != KineticsKind::None)
    out.push_back({"model.kinetics.kind",
                   "the two-species family carries no reaction term"});

  if (has_flow_field(m)) {
    if (!m.fluid.has_value()) {
      out.push_back({"model.fluid", "fluid families need flow parameters"});
    } else {
      if (!(m.fluid->nu > 0))
        out.push_back({"model.fluid.nu", "viscosity must be > 0"});
      if (!std::isfinite(m.fluid->kappa))
        out.push_back({"model.fluid.kappa", "must be finite"});
      if (m.family == Family::Fluid2D) {
        double norm = std::hypot(m.fluid->e_g_x, m.fluid->e_g_y);
        if (!(norm > 0))
          out.push_back({"model.fluid.e_g", "forcing direction must be nonzero"});
      }
    }
  }

  const int want_dim = m.family == Family::Fluid2D ? 2
                       : m.family == Family::Fluid1D ? 1
                                                     : grid.dim;
  if (grid.dim != want_dim)
    out.push_back({"grid.dim", "family requires dim = " +
                                   std::to_string(want_dim)});
  if (m.family == Family::Fluid2D && grid.boundary != Boundary::Periodic)
    out.push_back({"grid.boundary",
                   "the 2D flow family needs a periodic grid for the "
                   "streamfunction solve"});
  if (m.family == Family::Fluid2D && !is_power_of_two(grid.n))
    out.push_back({"grid.n", "streamfunction solve needs a power-of-two n"});
  (void)stepper;
}

void check_ic(const InitialCondition& ic, const ModelSpec& m, const Grid& grid,
              std::vector<Violation>& out) {
  const int nf = field_count(m);
  switch (ic.kind) {
    case InitialCondition::Kind::UniformPlusNoise:
      if (int(ic.base.size()) != nf)
        out.push_back({"ic.base", "needs one base value per field (" +
                                      std::to_string(nf) + ")"});
      if (ic.noise_amplitude < 0)
        out.push_back({"ic.noise_amplitude", "must be >= 0"});
      break;
    case InitialCondition::Kind::Gaussian:
      if (!(ic.width > 0)) out.push_back({"ic.width", "must be > 0"});
      if (!(ic.peak > 0)) out.push_back({"ic.peak", "must be > 0"});
      if (ic.v_peak < 0) out.push_back({"ic.v_peak", "must be >= 0"});
      if (ic.noise_amplitude < 0)
        out.push_back({"ic.noise_amplitude", "must be >= 0"});
      if (!ic.center.empty() && int(ic.center.size()) != grid.dim)
        out.push_back({"ic.center", "needs one coordinate per axis"});
      break;
    case InitialCondition::Kind::Explicit:
      if (int(ic.fields.size()) != nf) {
        out.push_back({"ic.fields", "needs one array per field (" +
                                        std::to_string(nf) + ")"});
      } else {
        for (size_t i = 0; i < ic.fields.size(); ++i)
          if (int(ic.fields[i].size()) != grid.points())
            out.push_back({"ic.fields." + std::to_string(i),
                           "needs " + std::to_string(grid.points()) +
                               " values"});
      }
      break;
  }
}

}  // namespace

ValidationReport validate(const RunConfig& cfg) {
  ValidationReport rep;
  auto& out = rep.violations;

  if (cfg.grid.dim != 1 && cfg.grid.dim != 2)
    out.push_back({"grid.dim", "must be 1 or 2"});
  if (cfg.grid.n < 8) out.push_back({"grid.n", "must be >= 8"});
  if (!(cfg.grid.length > 0)) out.push_back({"grid.length", "must be > 0"});

  const bool spectral = cfg.stepper == StepperKind::Ssfm ||
                        cfg.stepper == StepperKind::Etdrk4;
  if (spectral) {
    if (cfg.grid.boundary != Boundary::Periodic)
      out.push_back({"grid.boundary",
                     "spectral steppers need a periodic grid"});
    if (!is_power_of_two(cfg.grid.n))
      out.push_back({"grid.n", "spectral steppers need a power-of-two n"});
  }

  check_model(cfg.model, cfg.grid, cfg.stepper, out);

  if (!(cfg.dt > 0)) out.push_back({"run.dt", "must be > 0"});
  if (!(cfg.t_final >= cfg.dt))
    out.push_back({"run.t_final", "must cover at least one step"});
  if (cfg.snapshot_every < 1)
    out.push_back({"run.snapshot_every", "must be >= 1"});
  if (!(cfg.blowup_threshold > 0))
    out.push_back({"run.blowup_threshold", "must be > 0"});
  if (cfg.clip && !(cfg.clip->lo <= cfg.clip->hi))
    out.push_back({"run.clip", "needs lo <= hi"});
  if (cfg.record_free_energy && (cfg.grid.boundary != Boundary::Periodic ||
                                 !is_power_of_two(cfg.grid.n)))
    out.push_back({"run.record_free_energy",
                   "the potential solve needs a periodic power-of-two grid"});

  if (out.empty()) check_ic(cfg.ic, cfg.model, cfg.grid, out);
  return rep;
}

void require_valid(const RunConfig& cfg) {
  ValidationReport rep = validate(cfg);
  if (!rep.ok()) throw Error(Errc::BadValue, rep.to_string());
}

SteadyState homogeneous_steady_state(const ModelSpec& model) {
  return homogeneous_steady_state(model, {});
}

SteadyState homogeneous_steady_state(const ModelSpec& model,
                                     const std::vector<double>& base_u) {
  const int ns = species_count(model);
  SteadyState st;
  if (model.kinetics.kind == KineticsKind::None) {
    if (int(base_u.size()) != ns)
      throw Error(Errc::MissingKinetics,
                  "no reaction term fixes the density; supply base values");
    st.u = base_u;
  } else {
    // Logistic and Allee share the stable positive rest point u* = K.
    st.u.assign(size_t(ns), model.kinetics.K);
    if (!base_u.empty()) st.u = base_u;
  }
  if (!(model.signal.beta > 0))
    throw Error(Errc::BadValue,
                "model.signal.beta: chemical steady state needs beta > 0");
  if (int(model.signal.alpha.size()) != ns)
    throw Error(Errc::BadValue, "model.signal.alpha: size mismatch");
  double prod = 0.0;
  for (int i = 0; i < ns; ++i) prod += model.signal.alpha[size_t(i)] * st.u[size_t(i)];
  st.v = prod / model.signal.beta;
  return st;
}

}  // namespace chemotax
