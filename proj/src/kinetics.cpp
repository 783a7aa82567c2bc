#include "chemotax/kinetics.hpp"

#include <cmath>

namespace chemotax::kinetics {

double reaction(const Kinetics& kin, double u) {
  switch (kin.kind) {
    case KineticsKind::None:
      return 0.0;
    case KineticsKind::Logistic:
      return kin.r * u * (1.0 - u / kin.K);
    case KineticsKind::Allee:
      return kin.r * u * (1.0 - u / kin.K) * (u / kin.A - 1.0);
  }
  return 0.0;
}

double reaction_deriv(const Kinetics& kin, double u) {
  switch (kin.kind) {
    case KineticsKind::None:
      return 0.0;
    case KineticsKind::Logistic:
      return kin.r * (1.0 - 2.0 * u / kin.K);
    case KineticsKind::Allee: {
      // d/du [ r u (1 - u/K)(u/A - 1) ]
      double a = kin.A, K = kin.K;
      return kin.r * ((1.0 - 2.0 * u / K) * (u / a - 1.0) +
                      u * (1.0 - u / K) / a);
    }
  }
  return 0.0;
}

double signal_rate(const SignalKinetics& sig, const double* u, int n_species,
                   double v) {
  double g = -sig.beta * v;
  for (int i = 0; i < n_species; ++i) g += sig.alpha[size_t(i)] * u[i];
  return g;
}

std::array<std::array<double, 2>, 2> kinetic_jacobian(const ModelSpec& model,
                                                      double u, double v) {
  if (species_count(model) != 1)
    throw Error(Errc::BadState,
                "well-mixed jacobian is defined for one-species models");
  (void)v;  // g is linear in v
  return {{{reaction_deriv(model.kinetics, u), 0.0},
           {model.signal.alpha[0], -model.signal.beta}}};
}

void rk4_step(const OdeRhs& rhs, double t, double dt, std::vector<double>& y) {
  const size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  rhs(t, y, k1);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  rhs(t + 0.5 * dt, tmp, k2);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  rhs(t + 0.5 * dt, tmp, k3);
  for (size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  rhs(t + dt, tmp, k4);
  for (size_t i = 0; i < n; ++i)
    y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

namespace {

// Gram-Schmidt QR of a 2x2 tangent matrix stored column-major in
// y[2..5]; returns log|R_11|, log|R_22| and leaves Q in place.
std::array<double, 2> qr_renormalize(std::vector<double>& y) {
  double a0 = y[2], a1 = y[3];  // first column
  double b0 = y[4], b1 = y[5];  // second column
  double r11 = std::hypot(a0, a1);
  a0 /= r11;
  a1 /= r11;
  double r12 = a0 * b0 + a1 * b1;
  b0 -= r12 * a0;
  b1 -= r12 * a1;
  double r22 = std::hypot(b0, b1);
  y[2] = a0;
  y[3] = a1;
  y[4] = b0 / r22;
  y[5] = b1 / r22;
  return {std::log(r11), std::log(r22)};
}

}  // namespace

LyapunovResult lyapunov_spectrum(const ModelSpec& model,
                                 std::array<double, 2> ic, double t_final,
                                 double dt, int renorm_every) {
  if (!(dt > 0) || !(t_final >= dt))
    throw Error(Errc::BadValue, "lyapunov: need dt > 0 and t_final >= dt");
  if (renorm_every < 1)
    throw Error(Errc::BadValue, "lyapunov: renorm_every must be >= 1");
  if (species_count(model) != 1)
    throw Error(Errc::BadState, "lyapunov: one-species kinetics only");

  // Augmented system: state (u, v) plus the tangent matrix Phi, whose
  // stages see the Jacobian at the matching state stage.
  auto rhs = [&model](double, const std::vector<double>& y,
                      std::vector<double>& dy) {
    const double u = y[0], v = y[1];
    dy[0] = reaction(model.kinetics, u);
    dy[1] = signal_rate(model.signal, &u, 1, v);
    const double j00 = reaction_deriv(model.kinetics, u);
    const double j10 = model.signal.alpha[0];
    const double j11 = -model.signal.beta;
    dy[2] = j00 * y[2];
    dy[3] = j10 * y[2] + j11 * y[3];
    dy[4] = j00 * y[4];
    dy[5] = j10 * y[4] + j11 * y[5];
  };

  std::vector<double> y = {ic[0], ic[1], 1.0, 0.0, 0.0, 1.0};
  double acc1 = 0.0, acc2 = 0.0;

  LyapunovResult res;
  const long long n_steps = std::llround(t_final / dt);
  for (long long step = 1; step <= n_steps; ++step) {
    rk4_step(rhs, (step - 1) * dt, dt, y);
    if (step % renorm_every == 0 || step == n_steps) {
      auto logs = qr_renormalize(y);
      acc1 += logs[0];
      acc2 += logs[1];
      double t = step * dt;
      double le1 = acc1 / t, le2 = acc2 / t;
      res.history.push_back({t, le1, le2, kaplan_yorke({le1, le2})});
    }
  }

  double le1 = res.history.back()[1];
  double le2 = res.history.back()[2];
  if (le1 < le2) std::swap(le1, le2);
  res.exponents = {le1, le2};
  res.d_ky = kaplan_yorke(res.exponents);
  return res;
}

double kaplan_yorke(const std::vector<double>& exponents) {
  const size_t n = exponents.size();
  double prefix = 0.0;
  size_t j = 0;
  double sum_j = 0.0;
  for (size_t i = 0; i < n; ++i) {
    prefix += exponents[i];
    if (prefix >= 0.0) {
      j = i + 1;
      sum_j = prefix;
    }
  }
  if (j == 0) return 0.0;
  if (j == n) return double(n);
  return double(j) + sum_j / std::fabs(exponents[j]);
}

}  // namespace chemotax::kinetics
