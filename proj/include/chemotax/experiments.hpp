#pragma once

/// Parameter studies built on top of single runs: chi sweeps with a
/// transition estimate, dispersion-curve export, the planar critical
/// mass dichotomy, and an oscillation probe for the midpoint trace.

#include <optional>
#include <string>
#include <vector>

#include "chemotax/core.hpp"
#include "chemotax/simulate.hpp"

namespace chemotax::experiments {

/// Effective worker count: `requested` when positive, otherwise the
/// CHEMOTAX_WORKERS environment variable when it parses to a positive
/// integer, otherwise the hardware concurrency (at least 1).
int resolve_workers(int requested);

/// Outcome of a chi sweep. All arrays share one index and are sorted
/// by ascending chi (duplicates kept). max_u/max_v/max_w are the
/// largest magnitudes of the species-1, chemical, and flow fields at
/// the final recorded time (max_w is 0 for families without flow).
/// A run that stops early (threshold crossing or lost finiteness) is
/// flagged and reports the blow-up threshold as max_u; a non-finite
/// run reports the threshold for all three columns.
/// transition_estimate is the smallest chi whose max_u exceeds twice
/// the value at the smallest chi in the grid; empty when none does.
struct SweepResult {
  std::vector<double> chis;
  std::vector<double> max_u;
  std::vector<double> max_v;
  std::vector<double> max_w;
  std::vector<bool> terminated_early;
  std::optional<double> transition_estimate;
};

/// Run `base` once per chi (species-1 sensitivity overwritten; grid,
/// dt, and the noise seed shared so chi is the only varied quantity).
/// Points are distributed over `workers` threads (see
/// resolve_workers) through a shared queue; results are keyed by
/// their position in the sorted grid, so the output is independent of
/// scheduling. Sweeps keep scalar series and endpoint snapshots only:
/// snapshot cadence and the optional recording flags of `base` are
/// overridden.
SweepResult bifurcation_sweep(const RunConfig& base,
                              std::vector<double> chis, int workers = 0);

/// CSV view of a sweep: chi,max_u,max_v,max_w,terminated_early.
std::string sweep_csv(const SweepResult& result);

/// Growth-rate curves for each chi on a shared wavenumber grid of
/// `samples` points spanning [0, k_hi], evaluated at the homogeneous
/// steady state. CSV columns: chi,k,re_lambda,im_lambda,re_simplified,
/// where the last column is the one-field reduction with the species-1
/// diffusivity and signal parameters.
std::string dispersion_export(const ModelSpec& model,
                              const std::vector<double>& chis, double k_hi,
                              int samples);

/// Verdicts of the critical-mass probe, parallel to the mass list.
struct MassProbe {
  std::vector<double> masses;
  std::vector<simulate::TerminationKind> verdicts;
};

/// Planar aggregation dichotomy for the minimal parabolic pair
/// (no reaction, D_v = alpha = beta = 1, species diffusivity D and
/// sensitivity chi). Each target mass starts as a centered Gaussian
/// bump of the given width rescaled so its discrete integral equals
/// the mass exactly, stepped explicitly at half the initial stability
/// limit. A run is declared aggregated when the density grows past
/// twenty times its starting height; the relative threshold keeps the
/// fixed step stable up to the crossing. Requires a plane grid.
MassProbe critical_mass_probe(double D, double chi,
                              const std::vector<double>& masses,
                              const Grid& grid, double t_final,
                              double width = 0.5);

/// Verdict of the oscillation analysis of one scalar time series.
struct OscillationReport {
  bool oscillatory = false;
  double frequency = 0.0;   // dominant peak, cycles per unit time
  double peak_ratio = 0.0;  // peak magnitude over median background
};

/// Discrete Fourier analysis of the tail of a uniformly sampled
/// series (`dt` between samples): the last power-of-two half of the
/// data, mean removed. Oscillatory means the largest nonzero-
/// frequency magnitude is at least five times the median background
/// AND the implied amplitude is above a 1e-8 relative floor --
/// sub-roundoff ripple counts as settled. Needs at least 64 samples.
OscillationReport classify_series(const std::vector<double>& series,
                                  double dt);

/// Oscillation probe for the one-species logistic family: runs the
/// model with the given sensitivity on a line (n = 128, L = 10,
/// periodic, split-step, dt = 0.01) from a lightly perturbed steady
/// state, recording the midpoint density every step, and classifies
/// that trace. t_final must cover at least 64 samples.
OscillationReport hopf_probe(const ModelSpec& model, double chi,
                             double t_final);

}  // namespace chemotax::experiments
