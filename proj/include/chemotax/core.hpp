#pragma once

// Core vocabulary for the chemotaxis lab: model families, parameter
// structs, grids, run configuration, state storage, validation, and
// homogeneous steady states. Everything downstream (stability analysis,
// steppers, experiments, CLI) consumes these types.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemotax {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class Errc {
  BadGrid,               // grid shape/boundary unusable
  NonPositiveDiffusion,  // a diffusivity <= 0
  UnsupportedBoundary,   // operation requires a different boundary type
  MissingKinetics,       // steady state needs a reaction term or a base value
  NotWellMixedStable,    // threshold analysis requires a stable kinetic state
  NonPositiveChi,        // operation requires chi > 0
  BadValue,              // parameter out of range
  UnknownKey,            // config key not recognized
  BadState,              // state incompatible with requested operation
  Io,                    // file system failure
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Model description
// ---------------------------------------------------------------------------

enum class Family {
  KsLogistic,  // one species, one chemical, optional reaction
  TwoSpecies,  // two species, one shared chemical, no reactions
  Fluid1D,     // one species, chemical and scalar flow velocity on a line
  Fluid2D,     // one species, chemical and vorticity/streamfunction flow
};

enum class KineticsKind { None, Logistic, Allee };

// Population reaction f(u). Logistic: r u (1 - u/K).
// Allee: r u (1 - u/K)(u/A - 1), growth only between the threshold A
// and the carrying capacity K.
struct Kinetics {
  KineticsKind kind = KineticsKind::None;
  double r = 0.0;  // linear rate
  double K = 0.0;  // carrying capacity
  double A = 0.0;  // Allee threshold, 0 < A < K
};

// Chemical production/decay g(u, v) = sum_i alpha_i u_i - beta v.
struct SignalKinetics {
  std::vector<double> alpha;  // production per species, alpha_i >= 0
  double beta = 0.0;          // linear decay, beta >= 0
};

// Per-species transport: diffusivity and chemotactic sensitivity.
// chi > 0 attracts toward the chemical, chi < 0 repels.
struct SpeciesParams {
  double D = 0.0;
  double chi = 0.0;
};

// Flow coupling for the fluid families. e_g is the unit direction the
// density forcing acts along in 2D (gravity-like); the vorticity source
// is kappa * (e_g x grad u)_z. Default points down the y axis.
struct FluidParams {
  double nu = 0.0;     // kinematic viscosity
  double kappa = 0.0;  // density-to-flow forcing strength
  double e_g_x = 0.0;
  double e_g_y = -1.0;
};

struct ModelSpec {
  Family family = Family::KsLogistic;
  std::vector<SpeciesParams> species;  // size 1 (or 2 for TwoSpecies)
  double D_v = 0.0;                    // chemical diffusivity
  Kinetics kinetics;                   // applies to species 1
  SignalKinetics signal;
  std::optional<FluidParams> fluid;    // required for the fluid families
};

// Number of evolving fields: species..., chemical, then the flow field
// (scalar velocity in 1D, vorticity in 2D) for the fluid families.
int field_count(const ModelSpec& model);
int species_count(const ModelSpec& model);
bool has_flow_field(const ModelSpec& model);
std::vector<std::string> field_names(const ModelSpec& model);

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

enum class Boundary { Periodic, Neumann };

// Square uniform grid on [0, L]^dim. Periodic grids exclude the right
// endpoint (dx = L/n), Neumann grids include both endpoints
// (dx = L/(n-1)).
struct Grid {
  int dim = 1;
  int n = 0;          // points per axis, >= 8
  double length = 0;  // L
  Boundary boundary = Boundary::Periodic;

  double dx() const;
  int points() const;          // n^dim
  double cell_volume() const;  // dx^dim
  double coord(int i) const;   // i * dx
};

bool is_power_of_two(int n);

// ---------------------------------------------------------------------------
// Fields and state
// ---------------------------------------------------------------------------

// Scalar field on the grid, row-major with x fastest: data[iy*nx + ix].
// ny == 1 in one dimension.
struct Field {
  int nx = 0;
  int ny = 1;
  std::vector<double> data;

  Field() = default;
  Field(int nx_, int ny_) : nx(nx_), ny(ny_), data(size_t(nx_) * ny_, 0.0) {}

  double& at(int ix, int iy) { return data[size_t(iy) * nx + ix]; }
  double at(int ix, int iy) const { return data[size_t(iy) * nx + ix]; }
  size_t size() const { return data.size(); }

  double sup_abs() const;  // L-inf norm; NaN if any entry is NaN
  bool finite() const;
};

Field make_field(const Grid& grid);

// Evolving state: species densities, chemical, optional flow field,
// in the canonical order given by field_names().
struct State {
  std::vector<Field> fields;
  int n_species = 1;
  bool flow = false;
  double t = 0.0;

  Field& u(int i) { return fields[size_t(i)]; }
  const Field& u(int i) const { return fields[size_t(i)]; }
  Field& v() { return fields[size_t(n_species)]; }
  const Field& v() const { return fields[size_t(n_species)]; }
  Field& w() { return fields[size_t(n_species) + 1]; }
  const Field& w() const { return fields[size_t(n_species) + 1]; }

  bool finite() const;
};

State make_state(const ModelSpec& model, const Grid& grid);

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

enum class StepperKind { FdmEuler, Ssfm, Etdrk4 };

struct ClipRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Initial data. UniformPlusNoise: per-field base values with seeded
// uniform noise in [-amplitude, amplitude] added to the species fields
// (chemical and flow start at their base exactly). Gaussian: species 1
// is a centered bump peak*exp(-|x-c|^2/(2 width^2)) plus noise, the
// chemical an optional bump of height v_peak, remaining fields zero.
// Explicit: caller-supplied arrays. Negative species values produced by
// noise are clamped to zero.
struct InitialCondition {
  enum class Kind { UniformPlusNoise, Gaussian, Explicit };
  Kind kind = Kind::UniformPlusNoise;

  std::vector<double> base;  // per field; UniformPlusNoise
  double noise_amplitude = 0.0;

  std::vector<double> center;  // empty = domain midpoint
  double width = 0.0;
  double peak = 0.0;
  double v_peak = 0.0;

  std::vector<std::vector<double>> fields;  // Explicit
};

struct RunConfig {
  Grid grid;
  ModelSpec model;
  StepperKind stepper = StepperKind::FdmEuler;
  double dt = 0.0;
  double t_final = 0.0;
  int snapshot_every = 1;  // diagnostic/snapshot cadence in steps
  InitialCondition ic;
  std::optional<ClipRange> clip;
  double blowup_threshold = 1e6;
  std::uint64_t rng_seed = 0;
  // Dealias the transformed nonlinear terms (2/3 rule). Unset picks the
  // stepper default: on for Etdrk4, off otherwise.
  std::optional<bool> dealias;
  bool record_midpoint = false;
  bool record_free_energy = false;

  bool dealias_effective() const {
    return dealias.value_or(stepper == StepperKind::Etdrk4);
  }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string field;   // dotted config path, e.g. "model.species.0.D"
  std::string reason;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Structural and parameter checks; empty report iff the configuration
// is runnable. Never throws.
ValidationReport validate(const RunConfig& cfg);

// Throws Error{BadValue} with the report text when validation fails.
void require_valid(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Homogeneous steady state
// ---------------------------------------------------------------------------

// Spatially uniform reference state: u_i* from the kinetics (carrying
// capacity K) or from the supplied base densities when there is no
// reaction term, v* = sum_i alpha_i u_i* / beta. The flow field's
// reference value is zero.
struct SteadyState {
  std::vector<double> u;
  double v = 0.0;
};

SteadyState homogeneous_steady_state(const ModelSpec& model);
SteadyState homogeneous_steady_state(const ModelSpec& model,
                                     const std::vector<double>& base_u);

}  // namespace chemotax
