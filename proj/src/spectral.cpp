#include "chemotax/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace chemotax::spectral {

namespace {

// fftw planner state is global; creation/destruction must be serialized
// even though execution on distinct plans is thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Plan::Plan(const Grid& grid) {
  if (grid.boundary != Boundary::Periodic)
    throw Error(Errc::UnsupportedBoundary,
                "spectral transforms require periodic boundaries");
  if (grid.dim != 1 && grid.dim != 2)
    throw Error(Errc::BadGrid, "spectral plan supports dim 1 or 2");
  if (grid.n < 8 || !is_power_of_two(grid.n))
    throw Error(Errc::BadGrid,
                "spectral grids need n >= 8 and a power of two");
  if (!(grid.length > 0))
    throw Error(Errc::BadGrid, "grid length must be positive");

  dim_ = grid.dim;
  n_ = grid.n;
  length_ = grid.length;
  const int half = n_ / 2 + 1;
  n_modes_ = dim_ == 1 ? half : n_ * half;

  const double k1 = 2.0 * M_PI / length_;
  k_axis_.resize(size_t(n_));
  for (int i = 0; i < n_; ++i) {
    int idx = i < n_ / 2 ? i : i - n_;
    k_axis_[size_t(i)] = k1 * idx;
  }

  k2_.resize(size_t(n_modes_));
  kx_.resize(size_t(n_modes_));
  ky_.resize(size_t(n_modes_), 0.0);
  mask_.resize(size_t(n_modes_));
  const int ny = dim_ == 2 ? n_ : 1;
  for (int iy = 0; iy < ny; ++iy) {
    int idy = iy < n_ / 2 ? iy : iy - n_;
    double kyv = dim_ == 2 ? k1 * idy : 0.0;
    for (int ix = 0; ix < half; ++ix) {
      size_t m = size_t(iy) * half + ix;
      double kxv = k1 * ix;
      k2_[m] = kxv * kxv + kyv * kyv;
      kx_[m] = ix == n_ / 2 ? 0.0 : kxv;
      ky_[m] = (dim_ == 2 && iy == n_ / 2) ? 0.0 : kyv;
      bool drop = 3 * ix > n_ || 3 * std::abs(idy) > n_;
      mask_[m] = drop ? 0 : 1;
    }
  }

  const int points = dim_ == 1 ? n_ : n_ * n_;
  rbuf_ = fftw_alloc_real(size_t(points));
  fftw_complex* cbuf = fftw_alloc_complex(size_t(n_modes_));
  cbuf_ = cbuf;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (dim_ == 1) {
      fwd_ = fftw_plan_dft_r2c_1d(n_, rbuf_, cbuf, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_1d(n_, cbuf, rbuf_, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_r2c_2d(n_, n_, rbuf_, cbuf, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(n_, n_, cbuf, rbuf_, FFTW_ESTIMATE);
    }
  }
  if (fwd_ == nullptr || bwd_ == nullptr)
    throw Error(Errc::BadGrid, "fftw refused to plan this grid");
}

Plan::~Plan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
  if (rbuf_ != nullptr) fftw_free(rbuf_);
  if (cbuf_ != nullptr) fftw_free(cbuf_);
}

void Plan::forward(const Field& f, std::vector<cplx>& out) const {
  const int points = dim_ == 1 ? n_ : n_ * n_;
  if (int(f.size()) != points)
    throw Error(Errc::BadState, "field does not match the plan's grid");
  std::memcpy(rbuf_, f.data.data(), size_t(points) * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(fwd_));
  out.resize(size_t(n_modes_));
  const fftw_complex* cbuf = static_cast<const fftw_complex*>(cbuf_);
  for (int m = 0; m < n_modes_; ++m)
    out[size_t(m)] = cplx(cbuf[m][0], cbuf[m][1]);
}

void Plan::inverse(const std::vector<cplx>& in, Field& out) const {
  if (int(in.size()) != n_modes_)
    throw Error(Errc::BadState, "spectrum does not match the plan's grid");
  fftw_complex* cbuf = static_cast<fftw_complex*>(cbuf_);
  for (int m = 0; m < n_modes_; ++m) {
    cbuf[m][0] = in[size_t(m)].real();
    cbuf[m][1] = in[size_t(m)].imag();
  }
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const int points = dim_ == 1 ? n_ : n_ * n_;
  out.nx = n_;
  out.ny = dim_ == 2 ? n_ : 1;
  out.data.resize(size_t(points));
  const double scale = 1.0 / points;
  for (int i = 0; i < points; ++i) out.data[size_t(i)] = rbuf_[i] * scale;
}

void apply_dealias(const Plan& plan, std::vector<cplx>& fhat) {
  const auto& mask = plan.dealias_mask();
  for (size_t m = 0; m < fhat.size(); ++m)
    if (mask[m] == 0) fhat[m] = cplx(0.0, 0.0);
}

void gradient(const Plan& plan, const Field& f, std::vector<Field>& out) {
  std::vector<cplx> fhat;
  plan.forward(f, fhat);
  out.assign(size_t(plan.dim()), Field(f.nx, f.ny));
  std::vector<cplx> dhat(fhat.size());
  const auto& kx = plan.kx();
  for (size_t m = 0; m < fhat.size(); ++m)
    dhat[m] = cplx(-fhat[m].imag(), fhat[m].real()) * kx[m];  // i k fhat
  plan.inverse(dhat, out[0]);
  if (plan.dim() == 2) {
    const auto& ky = plan.ky();
    for (size_t m = 0; m < fhat.size(); ++m)
      dhat[m] = cplx(-fhat[m].imag(), fhat[m].real()) * ky[m];
    plan.inverse(dhat, out[1]);
  }
}

Field divergence(const Plan& plan, const std::vector<Field>& components) {
  if (int(components.size()) != plan.dim())
    throw Error(Errc::BadState, "divergence needs dim() components");
  std::vector<cplx> acc(size_t(plan.n_modes()), cplx(0.0, 0.0));
  std::vector<cplx> fhat;
  for (int d = 0; d < plan.dim(); ++d) {
    plan.forward(components[size_t(d)], fhat);
    const auto& k = d == 0 ? plan.kx() : plan.ky();
    for (size_t m = 0; m < fhat.size(); ++m)
      acc[m] += cplx(-fhat[m].imag(), fhat[m].real()) * k[m];
  }
  Field out(components[0].nx, components[0].ny);
  plan.inverse(acc, out);
  return out;
}

std::vector<double> linear_propagator(const Plan& plan, double D,
                                      double decay, double dt) {
  const auto& k2 = plan.k2();
  std::vector<double> prop(k2.size());
  for (size_t m = 0; m < k2.size(); ++m)
    prop[m] = std::exp(-(D * k2[m] + decay) * dt);
  return prop;
}

Etdrk4Coeffs etdrk4_coeffs(const Plan& plan, double D, double decay,
                           double dt) {
  const int M = 16;  // contour points on the upper unit semicircle
  cplx r[M];
  for (int j = 0; j < M; ++j)
    r[j] = std::exp(cplx(0.0, M_PI * (j + 0.5) / M));

  const auto& k2 = plan.k2();
  const size_t nm = k2.size();
  Etdrk4Coeffs co;
  co.E.resize(nm);
  co.E2.resize(nm);
  co.Q.resize(nm);
  co.f1.resize(nm);
  co.f2.resize(nm);
  co.f3.resize(nm);
  co.phi1.resize(nm);

  for (size_t m = 0; m < nm; ++m) {
    const double z = -(D * k2[m] + decay) * dt;
    co.E[m] = std::exp(z);
    co.E2[m] = std::exp(0.5 * z);
    cplx q(0), a(0), b(0), c(0), p1(0);
    for (int j = 0; j < M; ++j) {
      const cplx LR = z + r[j];
      const cplx LR3 = LR * LR * LR;
      const cplx eL = std::exp(LR);
      q += (std::exp(0.5 * LR) - 1.0) / LR;
      a += (-4.0 - LR + eL * (4.0 - 3.0 * LR + LR * LR)) / LR3;
      b += (2.0 + LR + eL * (-2.0 + LR)) / LR3;
      c += (-4.0 - 3.0 * LR - LR * LR + eL * (4.0 - LR)) / LR3;
      p1 += (eL - 1.0) / LR;
    }
    // real(mean) over the semicircle equals the full-circle average
    // for real z, which reproduces the entire function to roundoff
    const double w = dt / M;
    co.Q[m] = w * q.real();
    co.f1[m] = w * a.real();
    co.f2[m] = w * b.real();
    co.f3[m] = w * c.real();
    co.phi1[m] = w * p1.real();
  }
  return co;
}

Field poisson_solve_periodic(const Plan& plan, const Field& rhs) {
  std::vector<cplx> rhat;
  plan.forward(rhs, rhat);
  const auto& k2 = plan.k2();
  rhat[0] = cplx(0.0, 0.0);  // gauge: drop the mean
  for (size_t m = 1; m < rhat.size(); ++m) rhat[m] /= k2[m];
  Field phi(rhs.nx, rhs.ny);
  plan.inverse(rhat, phi);
  return phi;
}

}  // namespace chemotax::spectral
