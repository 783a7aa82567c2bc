#include "chemotax/linstab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "chemotax/kinetics.hpp"

namespace chemotax::linstab {

namespace {

void require_single_species(const ModelSpec& model, const char* what) {
  if (species_count(model) != 1)
    throw Error(Errc::BadState,
                std::string(what) + " needs a one-species model");
}

}  // namespace

std::array<std::array<double, 2>, 2> dispersion_matrix_single(
    const ModelSpec& model, double ustar, double k) {
  require_single_species(model, "dispersion matrix");
  const double k2 = k * k;
  const double fu = kinetics::reaction_deriv(model.kinetics, ustar);
  return {{{-model.species[0].D * k2 + fu, model.species[0].chi * ustar * k2},
           {model.signal.alpha[0], -model.D_v * k2 - model.signal.beta}}};
}

Eig growth_rate(const ModelSpec& model, double ustar, double k) {
  auto A = dispersion_matrix_single(model, ustar, k);
  const double tau = A[0][0] + A[1][1];
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  const double disc = tau * tau - 4.0 * det;
  if (disc >= 0.0) return {0.5 * (tau + std::sqrt(disc)), 0.0};
  return {0.5 * tau, 0.5 * std::sqrt(-disc)};
}

std::array<std::array<double, 3>, 3> dispersion_matrix_two_species(
    const ModelSpec& model, const std::array<double, 2>& ustar, double k) {
  if (species_count(model) != 2)
    throw Error(Errc::BadState, "two-species dispersion needs two species");
  const double k2 = k * k;
  const auto& sp = model.species;
  return {{{-sp[0].D * k2, 0.0, sp[0].chi * ustar[0] * k2},
           {0.0, -sp[1].D * k2, sp[1].chi * ustar[1] * k2},
           {model.signal.alpha[0], model.signal.alpha[1],
            -model.D_v * k2 - model.signal.beta}}};
}

namespace {

using cplx = std::complex<double>;

// Roots of lambda^3 + a lambda^2 + b lambda + c, one Newton polish on
// the monic cubic per root.
std::array<cplx, 3> cubic_roots(double a, double b, double c) {
  // Depressed form y^3 + p y + q with lambda = y - a/3.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = -a / 3.0;
  std::array<cplx, 3> y;

  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (std::fabs(p) < 1e-300) {
    const double t = std::cbrt(-q);
    const cplx w(-0.5, 0.5 * std::sqrt(3.0));  // primitive cube root of unity
    y = {cplx(t), t * w, t * std::conj(w)};
  } else if (disc >= 0.0) {
    // Three real roots: trigonometric form (requires p < 0 here).
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int i = 0; i < 3; ++i)
      y[size_t(i)] = m * std::cos(theta - 2.0 * M_PI * i / 3.0);
  } else {
    // One real root and a complex pair: Cardano.
    const double half_q = 0.5 * q;
    const double root = std::sqrt(half_q * half_q + p * p * p / 27.0);
    const double s = std::cbrt(-half_q + root);
    const double t = std::cbrt(-half_q - root);
    const double re = -(s + t) / 2.0;
    const double im = (s - t) * std::sqrt(3.0) / 2.0;
    y = {cplx(s + t), cplx(re, im), cplx(re, -im)};
  }

  std::array<cplx, 3> roots;
  for (int i = 0; i < 3; ++i) {
    cplx lam = y[size_t(i)] + shift;
    // Newton polish against the original monic coefficients.
    for (int it = 0; it < 2; ++it) {
      cplx f = ((lam + a) * lam + b) * lam + c;
      cplx df = (3.0 * lam + 2.0 * a) * lam + b;
      if (std::abs(df) > 0.0) lam -= f / df;
    }
    roots[size_t(i)] = lam;
  }
  return roots;
}

}  // namespace

std::array<Eig, 3> eigenvalues_two_species(const ModelSpec& model,
                                           const std::array<double, 2>& ustar,
                                           double k) {
  auto A = dispersion_matrix_two_species(model, ustar, k);
  const double tr = A[0][0] + A[1][1] + A[2][2];
  const double m2 = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) +
                    (A[0][0] * A[2][2] - A[0][2] * A[2][0]) +
                    (A[1][1] * A[2][2] - A[1][2] * A[2][1]);
  const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                     A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                     A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
  auto roots = cubic_roots(-tr, m2, -det);

  std::array<Eig, 3> eigs;
  for (int i = 0; i < 3; ++i)
    eigs[size_t(i)] = {roots[size_t(i)].real(), roots[size_t(i)].imag()};
  std::sort(eigs.begin(), eigs.end(), [](const Eig& x, const Eig& y) {
    if (x.re != y.re) return x.re > y.re;
    return x.im > y.im;
  });
  return eigs;
}

Eig growth_rate_two_species(const ModelSpec& model,
                            const std::array<double, 2>& ustar, double k) {
  auto eigs = eigenvalues_two_species(model, ustar, k);
  Eig lead = eigs[0];
  if (lead.im < 0.0) lead.im = -lead.im;
  return lead;
}

namespace {

// Determinant of the one-species dispersion matrix as a function of
// X = k^2, evaluated directly from the matrix entries.
double delta_of_X(const ModelSpec& model, double ustar, double chi, double X) {
  const double fu = kinetics::reaction_deriv(model.kinetics, ustar);
  const double a00 = -model.species[0].D * X + fu;
  const double a01 = chi * ustar * X;
  const double a10 = model.signal.alpha[0];
  const double a11 = -model.D_v * X - model.signal.beta;
  return a00 * a11 - a01 * a10;
}

struct DeltaMin {
  double X = 0.0;
  double value = 0.0;
};

// Minimum of the convex map X -> Delta(X) over X > 0: bracket by
// doubling, then ternary search.
DeltaMin minimize_delta(const ModelSpec& model, double ustar, double chi) {
  auto f = [&](double X) { return delta_of_X(model, ustar, chi, X); };
  double hi = 1.0;
  while (f(2.0 * hi) < f(hi) && hi < 1e12) hi *= 2.0;
  hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (f(m1) <= f(m2))
      hi = m2;
    else
      lo = m1;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  const double X = 0.5 * (lo + hi);
  return {X, f(X)};
}

}  // namespace

TuringThreshold turing_threshold(const ModelSpec& model, double ustar) {
  require_single_species(model, "pattern threshold");
  const double fu = kinetics::reaction_deriv(model.kinetics, ustar);
  const double r = -fu;
  const double beta = model.signal.beta;
  const double alpha = model.signal.alpha[0];
  const double D = model.species[0].D;
  const double Dv = model.D_v;
  if (!(r > 0.0) || !(beta > 0.0))
    throw Error(Errc::NotWellMixedStable,
                "threshold needs f'(u*) < 0 and beta > 0");
  if (!(alpha > 0.0) || !(ustar > 0.0))
    throw Error(Errc::BadValue, "threshold needs alpha > 0 and u* > 0");
  if (!(D > 0.0) || !(Dv > 0.0))
    throw Error(Errc::NonPositiveDiffusion, "threshold needs D, D_v > 0");

  TuringThreshold th;
  th.chi_crit =
      (2.0 * std::sqrt(D * Dv * r * beta) + D * beta + Dv * r) / (alpha * ustar);
  th.k_c = std::pow(r * beta / (D * Dv), 0.25);

  // Independent numeric route: bisect on chi for the value at which the
  // minimum of Delta(X) touches zero (the double root).
  double lo = 0.0, hi = 1.0;
  while (minimize_delta(model, ustar, hi).value > 0.0 && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (minimize_delta(model, ustar, mid).value > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  th.chi_crit_numeric = 0.5 * (lo + hi);
  th.k_c_numeric = std::sqrt(minimize_delta(model, ustar, th.chi_crit_numeric).X);
  return th;
}

std::optional<Band> unstable_band(const ModelSpec& model, double ustar) {
  require_single_species(model, "unstable band");
  const double fu = kinetics::reaction_deriv(model.kinetics, ustar);
  const double beta = model.signal.beta;
  const double alpha = model.signal.alpha[0];
  const double D = model.species[0].D;
  const double Dv = model.D_v;
  const double chi = model.species[0].chi;

  // Delta(X) = a X^2 - b X + c
  const double a = D * Dv;
  const double b = chi * ustar * alpha - (D * beta - Dv * fu);
  const double c = fu * (-beta);
  const double disc = b * b - 4.0 * a * c;
  if (b <= 0.0 || disc <= 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  const double x_lo = (b - root) / (2.0 * a);
  const double x_hi = (b + root) / (2.0 * a);
  if (x_hi <= 0.0) return std::nullopt;
  return Band{std::sqrt(std::max(x_lo, 0.0)), std::sqrt(x_hi)};
}

HopfReport hopf_criterion_kinetic(const ModelSpec& model, double ustar,
                                  double k) {
  require_single_species(model, "oscillation criterion");
  const double fu = kinetics::reaction_deriv(model.kinetics, ustar);
  const double r = -fu;
  const double k2 = k * k;
  HopfReport rep;
  rep.chi_h = (model.species[0].D * k2 + r) * (model.D_v * k2 + model.signal.beta) /
              (model.signal.alpha[0] * ustar);
  auto A = dispersion_matrix_single(model, ustar, k);
  const double tau = A[0][0] + A[1][1];
  const double det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  rep.discriminant = tau * tau - 4.0 * det;
  rep.oscillatory = rep.discriminant < 0.0 && tau >= 0.0;
  return rep;
}

double simplified_dispersion(double k, double chi, double D, double alpha,
                             double beta) {
  const double k2 = k * k;
  const double s = chi * k2 * chi * k2 - alpha * beta;
  double re = -D * k2;
  if (s > 0.0) re += std::sqrt(s);
  return re;
}

bool fluid_stability_condition(const ModelSpec& model, double length) {
  require_single_species(model, "line stability bound");
  if (!(model.signal.beta > 0.0))
    throw Error(Errc::BadValue, "stability bound needs beta > 0");
  if (!(length > 0.0)) throw Error(Errc::BadValue, "needs length > 0");
  const double lhs = model.species[0].chi * model.signal.alpha[0] /
                     model.signal.beta;
  const double rhs = model.species[0].D * M_PI * M_PI / (length * length);
  return lhs < rhs;
}

double critical_mass(double D, double chi) {
  if (!(D > 0.0))
    throw Error(Errc::NonPositiveDiffusion, "critical mass needs D > 0");
  if (!(chi > 0.0))
    throw Error(Errc::NonPositiveChi, "critical mass needs chi > 0");
  return 8.0 * M_PI * D / chi;
}

DispersionScan dispersion_scan(const ModelSpec& model, double ustar,
                               double k_hi, int samples) {
  if (samples < 2 || !(k_hi > 0.0))
    throw Error(Errc::BadValue, "scan needs k_hi > 0 and samples >= 2");
  DispersionScan scan;
  scan.k.reserve(size_t(samples));
  double best = -1e300;
  for (int i = 0; i < samples; ++i) {
    const double k = k_hi * i / double(samples - 1);
    const Eig e = growth_rate(model, ustar, k);
    scan.k.push_back(k);
    scan.re.push_back(e.re);
    scan.im.push_back(e.im);
    if (e.re > 0.0) scan.has_instability = true;
    if (e.re > best) {
      best = e.re;
      scan.k_fastest = k;
    }
  }
  return scan;
}

}  // namespace chemotax::linstab
