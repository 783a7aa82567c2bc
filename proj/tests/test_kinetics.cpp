#include "doctest.h"

#include <cmath>

#include "chemotax/kinetics.hpp"
#include "test_support.hpp"

using namespace chemotax;

TEST_SUITE_BEGIN("kinetics");

TEST_CASE("logistic reaction: rest points and interior growth") {
  Kinetics kin{KineticsKind::Logistic, 0.5, 2.0, 0.0};
  CHECK(kinetics::reaction(kin, 0.0) == 0.0);
  CHECK(kinetics::reaction(kin, 2.0) == doctest::Approx(0.0).epsilon(1e-15));
  // f(K/2) = r K / 4
  CHECK(kinetics::reaction(kin, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  // f'(K) = -r
  CHECK(kinetics::reaction_deriv(kin, 2.0) ==
        doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("allee reaction: three rest points with a survival threshold") {
  Kinetics kin{KineticsKind::Allee, 1.0, 1.0, 0.3};
  CHECK(kinetics::reaction(kin, 0.0) == 0.0);
  CHECK(kinetics::reaction(kin, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kinetics::reaction(kin, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kinetics::reaction(kin, 0.1) < 0.0);  // below threshold: decline
  CHECK(kinetics::reaction(kin, 0.6) > 0.0);  // above threshold: growth
}

TEST_CASE("reaction derivative matches a finite difference") {
  for (Kinetics kin : {Kinetics{KineticsKind::Logistic, 0.7, 1.3, 0.0},
                       Kinetics{KineticsKind::Allee, 0.9, 2.0, 0.5},
                       Kinetics{KineticsKind::None, 0.0, 0.0, 0.0}}) {
    for (double u : {0.2, 0.9, 1.7}) {
      double h = 1e-6;
      double fd = (kinetics::reaction(kin, u + h) -
                   kinetics::reaction(kin, u - h)) /
                  (2 * h);
      CHECK(kinetics::reaction_deriv(kin, u) ==
            doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("signal rate sums species production against linear decay") {
  SignalKinetics sig{{1.0, 0.001}, 0.001};
  double u[2] = {0.5, 0.5};
  // g = 1*0.5 + 0.001*0.5 - 0.001*500.5 = 0 at the steady chemical level
  CHECK(kinetics::signal_rate(sig, u, 2, 500.5) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kinetics::signal_rate(sig, u, 2, 0.0) ==
        doctest::Approx(0.5005).epsilon(1e-15));
}

TEST_CASE("well-mixed jacobian at the rest point is lower triangular") {
  ModelSpec m = testsup::reference_logistic_model();
  auto J = kinetics::kinetic_jacobian(m, 1.0, 2.0);
  CHECK(J[0][0] == doctest::Approx(-0.5).epsilon(1e-15));  // f'(K) = -r
  CHECK(J[0][1] == 0.0);
  CHECK(J[1][0] == doctest::Approx(1.0).epsilon(1e-15));   // alpha
  CHECK(J[1][1] == doctest::Approx(-0.5).epsilon(1e-15));  // -beta

  // Cross-check off the rest point against a finite difference of the
  // well-mixed right-hand side.
  auto rhs = [&m](const std::vector<double>& y) {
    std::vector<double> dy(2);
    dy[0] = kinetics::reaction(m.kinetics, y[0]);
    dy[1] = kinetics::signal_rate(m.signal, y.data(), 1, y[1]);
    return dy;
  };
  auto Jfd = testsup::fd_jacobian(rhs, {0.7, 1.1});
  auto Ja = kinetics::kinetic_jacobian(m, 0.7, 1.1);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(Ja[i][j] == doctest::Approx(Jfd[i][j]).epsilon(1e-7));
}

TEST_CASE("rk4 reproduces exponential decay to quadrature accuracy") {
  std::vector<double> y = {1.0};
  auto rhs = [](double, const std::vector<double>& s, std::vector<double>& d) {
    d[0] = -s[0];
  };
  double dt = 1e-3;
  for (int i = 0; i < 1000; ++i) kinetics::rk4_step(rhs, i * dt, dt, y);
  CHECK(std::fabs(y[0] - std::exp(-1.0)) < 1e-10);
}

TEST_CASE("rk4 reproduces the logistic closed form") {
  double r = 1.3, K = 2.0, u0 = 0.1, T = 3.0;
  std::vector<double> y = {u0};
  auto rhs = [&](double, const std::vector<double>& s, std::vector<double>& d) {
    d[0] = r * s[0] * (1.0 - s[0] / K);
  };
  int n = 3000;
  double dt = T / n;
  for (int i = 0; i < n; ++i) kinetics::rk4_step(rhs, i * dt, dt, y);
  CHECK(std::fabs(y[0] - testsup::logistic_exact(u0, r, K, T)) < 1e-9);
}

TEST_CASE("rk4 converges at fourth order") {
  auto err_at = [](double dt) {
    std::vector<double> y = {1.0, 0.0};
    // harmonic oscillator, exact solution (cos t, -sin t)
    auto rhs = [](double, const std::vector<double>& s,
                  std::vector<double>& d) {
      d[0] = s[1];
      d[1] = -s[0];
    };
    int n = int(std::lround(1.0 / dt));
    for (int i = 0; i < n; ++i) kinetics::rk4_step(rhs, i * dt, dt, y);
    return std::fabs(y[0] - std::cos(1.0));
  };
  double e1 = err_at(1e-2), e2 = err_at(5e-3);
  double ratio = e1 / e2;
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("lyapunov spectrum of the degenerate rest point straddles -1") {
  // r = beta = alpha = K = 1: the rest-point Jacobian [[-1,0],[1,-1]] is
  // a Jordan block, so finite-time exponents split around -1 by
  // ~log(t)/t while their sum tracks the trace -2.
  ModelSpec m;
  m.family = Family::KsLogistic;
  m.species = {{0.1, 0.1}};
  m.D_v = 0.1;
  m.kinetics = {KineticsKind::Logistic, 1.0, 1.0, 0.0};
  m.signal.alpha = {1.0};
  m.signal.beta = 1.0;

  auto res = kinetics::lyapunov_spectrum(m, {0.5, 0.5}, 1000.0, 0.01, 10);
  REQUIRE(res.exponents.size() == 2);
  CHECK(res.exponents[0] >= res.exponents[1]);
  CHECK(std::fabs(res.exponents[0] + 1.0) < 0.05);
  CHECK(std::fabs(res.exponents[1] + 1.0) < 0.05);
  CHECK(std::fabs(res.exponents[0] + res.exponents[1] + 2.0) < 0.02);
  CHECK(res.d_ky == 0.0);

  REQUIRE_FALSE(res.history.empty());
  CHECK(res.history.back()[0] == doctest::Approx(1000.0).epsilon(1e-12));
  for (size_t i = 1; i < res.history.size(); ++i)
    CHECK(res.history[i][0] > res.history[i - 1][0]);
}

TEST_CASE("lyapunov spectrum recovers distinct contraction rates") {
  // r = 2, beta = 1: rest-point eigenvalues (-2, -1), exponents sorted
  // descending should approach (-1, -2).
  ModelSpec m;
  m.family = Family::KsLogistic;
  m.species = {{0.1, 0.1}};
  m.D_v = 0.1;
  m.kinetics = {KineticsKind::Logistic, 2.0, 1.0, 0.0};
  m.signal.alpha = {1.0};
  m.signal.beta = 1.0;

  auto res = kinetics::lyapunov_spectrum(m, {0.5, 0.5}, 400.0, 0.01, 10);
  CHECK(std::fabs(res.exponents[0] + 1.0) < 0.05);
  CHECK(std::fabs(res.exponents[1] + 2.0) < 0.05);
  CHECK(res.d_ky == 0.0);
}

TEST_CASE("kaplan-yorke dimension from ordered exponents") {
  using kinetics::kaplan_yorke;
  CHECK(kaplan_yorke({0.5, -1.0}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(kaplan_yorke({0.0, -1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(kaplan_yorke({-0.5, -1.0}) == 0.0);
  CHECK(kaplan_yorke({1.0, -0.5, -2.0}) ==
        doctest::Approx(2.25).epsilon(1e-15));
  // all prefix sums nonnegative: dimension of the whole space
  CHECK(kaplan_yorke({1.0, 0.5}) == 2.0);
  // scale invariance
  CHECK(kaplan_yorke({2.0, -1.0, -4.0}) ==
        doctest::Approx(kaplan_yorke({1.0, -0.5, -2.0})).epsilon(1e-14));
}

TEST_SUITE_END();
