#pragma once

// Periodic pseudo-spectral machinery: real-to-complex transform plans,
// wavenumber tables, derivative and propagator multipliers, the 2/3
// dealias mask, exponential-integrator weights, and the periodic
// Poisson solve used by the incompressible-flow coupling.

#include <complex>
#include <vector>

#include "chemotax/core.hpp"

namespace chemotax::spectral {

using cplx = std::complex<double>;

/// One transform workspace bound to a periodic power-of-two grid. Owns
/// aligned scratch buffers and plans; transforms copy through them, so
/// the caller's arrays are never aliased or destroyed. A single Plan
/// must not be used from two threads at once; distinct Plans are safe
/// concurrently (plan creation itself is serialized internally).
class Plan {
 public:
  explicit Plan(const Grid& grid);
  ~Plan();
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  int dim() const { return dim_; }
  int n() const { return n_; }
  double length() const { return length_; }
  /// Half-spectrum storage size: n/2+1 in one dimension, n*(n/2+1) in
  /// two (x is the halved axis, y the full one, row-major in y).
  int n_modes() const { return n_modes_; }

  /// Conceptual per-axis wavenumbers in transform order,
  /// [0, 1, .., n/2-1, -n/2, .., -1] * (2 pi / L).
  const std::vector<double>& k_axis() const { return k_axis_; }

  /// |k|^2 per stored mode (Nyquist included: even-order multipliers
  /// are unambiguous).
  const std::vector<double>& k2() const { return k2_; }
  /// First-derivative multipliers per stored mode, with the Nyquist
  /// frequency zeroed (its odd derivative has no real representative).
  const std::vector<double>& kx() const { return kx_; }
  const std::vector<double>& ky() const { return ky_; }  // all zero in 1d
  /// 1 = keep, 0 = zero: modes with any axis index above n/3 are
  /// dropped by the two-thirds rule.
  const std::vector<unsigned char>& dealias_mask() const { return mask_; }

  void forward(const Field& f, std::vector<cplx>& out) const;
  /// Normalized inverse: inverse(forward(f)) == f. The input vector is
  /// left untouched.
  void inverse(const std::vector<cplx>& in, Field& out) const;

 private:
  int dim_ = 1;
  int n_ = 0;
  int n_modes_ = 0;
  double length_ = 0.0;
  std::vector<double> k_axis_, k2_, kx_, ky_;
  std::vector<unsigned char> mask_;
  // fftw handles, kept opaque so this header stays library-free
  double* rbuf_ = nullptr;
  void* cbuf_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

/// Zero every mode the two-thirds mask excludes.
void apply_dealias(const Plan& plan, std::vector<cplx>& fhat);

/// Gradient by ik multiplication; out receives dim() components.
void gradient(const Plan& plan, const Field& f, std::vector<Field>& out);

/// Divergence of a vector field with dim() components.
Field divergence(const Plan& plan, const std::vector<Field>& components);

/// Per-mode decay factors exp(-(D |k|^2 + decay) dt): the exact
/// solution operator of the linear part over one step.
std::vector<double> linear_propagator(const Plan& plan, double D,
                                      double decay, double dt);

/// Fourth-order exponential-integrator weights for the diagonal
/// operator L = -(D |k|^2 + decay). The singular-looking weights are
/// evaluated through a 16-point contour mean around each L*dt, which
/// is exact to roundoff for these entire functions and immune to the
/// z -> 0 cancellation. phi1 = (e^{L dt} - 1)/L is exposed separately
/// for exact constant-forcing integration.
struct Etdrk4Coeffs {
  std::vector<double> E;     // e^{L dt}
  std::vector<double> E2;    // e^{L dt / 2}
  std::vector<double> Q;     // (dt/2) phi1(L dt / 2): half-step forcing
  std::vector<double> f1, f2, f3;  // stage combination weights
  std::vector<double> phi1;  // dt phi1(L dt)
};
Etdrk4Coeffs etdrk4_coeffs(const Plan& plan, double D, double decay,
                           double dt);

/// Solve -lap(phi) = rhs with periodic boundaries. The mean mode is
/// projected out, so the result has zero mean (the gauge choice) and
/// any mean in rhs is ignored.
Field poisson_solve_periodic(const Plan& plan, const Field& rhs);

}  // namespace chemotax::spectral
