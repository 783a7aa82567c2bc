#pragma once

// Reaction terms, the well-mixed (space-free) kinetic system, and its
// chaos diagnostics: RK4 integration, Lyapunov spectra via QR
// renormalization of the tangent flow, and the Kaplan-Yorke dimension.

#include <array>
#include <functional>
#include <vector>

#include "chemotax/core.hpp"

namespace chemotax::kinetics {

// f(u): population reaction. None -> 0.
double reaction(const Kinetics& kin, double u);

// df/du, used by the linear stability analysis.
double reaction_deriv(const Kinetics& kin, double u);

// g(u, v) = sum_i alpha_i u_i - beta v.
double signal_rate(const SignalKinetics& sig, const double* u, int n_species,
                   double v);

// Jacobian of the well-mixed system (du/dt = f(u), dv/dt = g(u, v))
// at (u, v): [[f'(u), 0], [alpha, -beta]]. Single-species models only.
std::array<std::array<double, 2>, 2> kinetic_jacobian(const ModelSpec& model,
                                                      double u, double v);

// One classical RK4 step of y' = rhs(t, y), in place. The callback
// writes dy for the supplied y; dy is preallocated to y's size.
using OdeRhs =
    std::function<void(double t, const std::vector<double>& y,
                       std::vector<double>& dy)>;
void rk4_step(const OdeRhs& rhs, double t, double dt, std::vector<double>& y);

// Lyapunov exponents of the well-mixed kinetic system by the tangent
// QR method: the 2x2 tangent matrix is integrated alongside the state
// with the same RK4 steps and re-orthonormalized every renorm_every
// steps; the accumulated log diagonal of R over elapsed time gives the
// finite-time exponents.
struct LyapunovResult {
  std::vector<double> exponents;  // sorted descending
  double d_ky = 0.0;
  // one row per renormalization: { t, le1, le2, d_ky }
  std::vector<std::array<double, 4>> history;
};

LyapunovResult lyapunov_spectrum(const ModelSpec& model,
                                 std::array<double, 2> ic, double t_final,
                                 double dt = 1e-2, int renorm_every = 10);

// Kaplan-Yorke dimension from exponents sorted descending:
// j + (sum of the first j) / |lambda_{j+1}| for the largest j whose
// prefix sum is nonnegative; 0 when even lambda_1 < 0; the full
// dimension when every prefix sum is nonnegative.
double kaplan_yorke(const std::vector<double>& exponents);

}  // namespace chemotax::kinetics
