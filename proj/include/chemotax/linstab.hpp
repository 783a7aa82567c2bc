#pragma once

// Linear stability of the homogeneous steady state: dispersion
// matrices for plane-wave perturbations e^{ikx}, growth rates, the
// pattern-onset threshold in the chemotactic sensitivity (closed form
// plus an independent numeric double-root search), oscillatory-onset
// criteria, and the aggregation mass threshold.

#include <array>
#include <optional>
#include <vector>

#include "chemotax/core.hpp"

namespace chemotax::linstab {

struct Eig {
  double re = 0.0;
  double im = 0.0;  // reported nonnegative for complex pairs
};

// 2x2 dispersion matrix of the one-species system linearized at
// (u*, v* ): [[-D k^2 + f'(u*), chi u* k^2], [alpha, -D_v k^2 - beta]].
std::array<std::array<double, 2>, 2> dispersion_matrix_single(
    const ModelSpec& model, double ustar, double k);

// Leading eigenvalue (largest real part) of the 2x2 dispersion matrix.
Eig growth_rate(const ModelSpec& model, double ustar, double k);

// 3x3 dispersion matrix for two species sharing one chemical.
std::array<std::array<double, 3>, 3> dispersion_matrix_two_species(
    const ModelSpec& model, const std::array<double, 2>& ustar, double k);

// All three eigenvalues, sorted by descending real part. Solved via
// the characteristic cubic with a complex Newton polish per root.
std::array<Eig, 3> eigenvalues_two_species(const ModelSpec& model,
                                           const std::array<double, 2>& ustar,
                                           double k);

Eig growth_rate_two_species(const ModelSpec& model,
                            const std::array<double, 2>& ustar, double k);

// Pattern-onset threshold for the one-species model. Closed form
//   chi_crit = (2 sqrt(D D_v r beta) + D beta + D_v r) / (alpha u*),
//   k_c^2 = sqrt(r beta / (D D_v)),   r := -f'(u*),
// cross-checked by a bisection on chi locating the double root of the
// determinant Delta(X = k^2) of the dispersion matrix, evaluated
// directly (no discriminant algebra shared with the closed form).
// Throws Error{NotWellMixedStable} when the k = 0 state is not stable
// (f'(u*) >= 0 or beta <= 0), Error{BadValue} for alpha or u* <= 0.
struct TuringThreshold {
  double chi_crit = 0.0;
  double k_c = 0.0;
  double chi_crit_numeric = 0.0;
  double k_c_numeric = 0.0;
};

TuringThreshold turing_threshold(const ModelSpec& model, double ustar);

// Wavenumber interval with positive growth at the model's chi, if any:
// the two positive roots of Delta(k^2) = 0.
struct Band {
  double k_lo = 0.0;
  double k_hi = 0.0;
};

std::optional<Band> unstable_band(const ModelSpec& model, double ustar);

// Oscillatory-onset threshold chi_H(k) = (D k^2 + r)(D_v k^2 + beta)
// / (alpha u*) together with the eigenvalue discriminant
// tau(k)^2 - 4 Delta(k) at the model's chi. oscillatory is set when
// the pair is complex with nonnegative real part.
struct HopfReport {
  double chi_h = 0.0;
  double discriminant = 0.0;
  bool oscillatory = false;
};

HopfReport hopf_criterion_kinetic(const ModelSpec& model, double ustar,
                                  double k);

// Reduced one-species dispersion relation
//   Re lambda(k) = Re( -D k^2 + sqrt((chi k^2)^2 - alpha beta) ).
double simplified_dispersion(double k, double chi, double D, double alpha,
                             double beta);

// Uniform-state stability bound for the line with flow coupling:
// stable iff chi alpha / beta < D pi^2 / L^2.
bool fluid_stability_condition(const ModelSpec& model, double length);

// Aggregation threshold for the parabolic pair in the plane:
// M_c = 8 pi D / chi. Throws for chi <= 0 or D <= 0.
double critical_mass(double D, double chi);

// Sampled growth-rate curve on [0, k_hi].
struct DispersionScan {
  std::vector<double> k;
  std::vector<double> re;
  std::vector<double> im;
  bool has_instability = false;
  double k_fastest = 0.0;  // argmax of re
};

DispersionScan dispersion_scan(const ModelSpec& model, double ustar,
                               double k_hi, int samples);

}  // namespace chemotax::linstab
