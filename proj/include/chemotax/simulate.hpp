#pragma once

// Time integration and run orchestration: the explicit finite-
// difference stepper, the split-step Fourier stepper (exact linear
// propagator, explicit nonlinear update on the propagated state), and
// the four-stage exponential stepper, plus the scalar diagnostics
// (mass, entropy, free energy, second moment) recorded along a run.
//
// A run records scalar diagnostics every step and field snapshots
// every snapshot_every steps (plus the initial and final states), and
// stops early when the density crosses the blow-up threshold while
// finite (BlowUp) or any field leaves the floating-point range
// (NonFinite).

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chemotax/core.hpp"
#include "chemotax/models.hpp"
#include "chemotax/spectral.hpp"

namespace chemotax::simulate {

enum class TerminationKind { Completed, BlowUp, NonFinite };

const char* to_string(TerminationKind kind);

struct Termination {
  TerminationKind kind = TerminationKind::Completed;
  double t = 0.0;  // horizon when Completed, detection time otherwise
};

// Column-oriented scalar series, one entry per recorded step. The
// optional columns are empty unless the run requested them.
struct SeriesTable {
  std::vector<double> t;
  std::vector<std::vector<double>> mass;  // per species
  std::vector<double> sup_u;
  std::vector<double> entropy;
  std::vector<double> second_moment;
  std::vector<double> free_energy;
  std::vector<std::vector<double>> midpoint;  // per field, central point

  size_t rows() const { return t.size(); }
};

struct RunRecord {
  RunConfig cfg;
  SeriesTable series;
  std::vector<double> snapshot_times;
  std::vector<std::vector<Field>> snapshots;  // all fields per time
  State final_state;
  Termination termination;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

// One time-stepping scheme bound to a model and grid. The spectral
// kinds build a transform plan and therefore need a periodic
// power-of-two grid. Coefficient tables are cached per dt and rebuilt
// when the step size changes. The optional clip is applied to the
// species fields after every step; `dealias` applies the 2/3-rule
// mask to the advanced spectra (split stepper) or to the stage
// spectra and nonlinear terms (exponential stepper), and is ignored
// by the finite-difference stepper.
class Stepper {
 public:
  Stepper(const ModelSpec& model, const Grid& grid, StepperKind kind,
          bool dealias, std::optional<ClipRange> clip = {});

  // Advances the fields by one step of dt; does not touch s.t.
  void step(State& s, double dt);

  StepperKind kind() const { return kind_; }
  models::Rhs& rhs() { return rhs_; }
  const models::Rhs& rhs() const { return rhs_; }

 private:
  void step_euler(State& s, double dt);
  void step_ssfm(State& s, double dt);
  void step_etdrk4(State& s, double dt);
  void refresh(double dt);
  void apply_clip(State& s);

  StepperKind kind_;
  bool dealias_;
  std::optional<ClipRange> clip_;
  models::Rhs rhs_;
  double cached_dt_ = -1.0;
  std::vector<std::vector<double>> prop_;        // split-step propagators
  std::vector<spectral::Etdrk4Coeffs> coeffs_;   // exponential tables
  // exponential stage spectra, kept allocated across steps
  std::vector<std::vector<spectral::cplx>> vhat_, ahat_, bhat_, chat_;
  std::vector<std::vector<spectral::cplx>> nv_, na_, nb_, nc_;
};

// Builds the seeded initial state described by cfg.ic (see the
// InitialCondition contract in core.hpp). Noise draws are ordered
// field-major, then row-major over points.
State initial_state(const RunConfig& cfg);

// Per-species total mass, by the grid's conservation quadrature.
std::vector<double> mass(const State& s, const Grid& grid);

// E = integral of u log u - u + (chi/D) u v + v^2/2, with species 1's
// chi and D. The log is floored at u = 1e-12 (0 log 0 := 0); the
// state itself is never modified. `floored` (optional) reports
// whether the floor was hit anywhere.
double entropy(const State& s, const ModelSpec& model, const Grid& grid,
               bool* floored = nullptr);

// F = integral of u ln u - u, minus (chi/(2 beta)) integral of u phi
// where -lap(phi) = u - mean(u) with the zero-mean spectral inverse.
// Periodic grids only.
double free_energy(const State& s, const ModelSpec& model, const Grid& grid,
                   const spectral::Plan& plan);

// I = integral of |x - x_c|^2 u, centered at the domain midpoint.
double second_moment(const State& s, const Grid& grid);

// Validates cfg, then integrates to t_final, recording diagnostics
// and snapshots. Stepper failures are reported in the termination
// field, never thrown.
RunRecord run(const RunConfig& cfg);

// CSV text of the scalar series: t, mass_1[, mass_2], sup_u, entropy
// [, free_energy], second_moment[, <field>_mid ...].
std::string series_csv(const RunRecord& rec);

// CSV text of one field at one time: an nx,ny,L,t header pair of
// lines, then ny rows of nx values.
std::string snapshot_csv(const Field& f, const Grid& grid, double t);

}  // namespace chemotax::simulate
