#include "chemotax/models.hpp"

#include <cmath>

#include "chemotax/fdm.hpp"
#include "chemotax/kinetics.hpp"

namespace chemotax::models {

namespace {

void axpy(Field& y, double a, const Field& x) {
  for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

}  // namespace

Rhs::Rhs(const ModelSpec& model, const Grid& grid, Backend backend)
    : model_(model), grid_(grid), backend_(backend) {
  const bool fluid_family =
      model.family == Family::Fluid1D || model.family == Family::Fluid2D;
  if (fluid_family && !model.fluid)
    throw Error(Errc::BadValue, "flow families need fluid parameters");

  for (const auto& sp : model.species) linear_.push_back({sp.D, 0.0});
  linear_.push_back({model.D_v, model.signal.beta});
  if (fluid_family) linear_.push_back({model.fluid->nu, 0.0});

  if (backend == Backend::Spectral || model.family == Family::Fluid2D)
    plan_ = std::make_unique<spectral::Plan>(grid);
}

bool Rhs::uses_kinetics() const {
  return model_.family != Family::TwoSpecies &&
         model_.kinetics.kind != KineticsKind::None;
}

void Rhs::check_state(const State& s) const {
  if (int(s.fields.size()) != field_count(model_))
    throw Error(Errc::BadState, "state does not match the model's fields");
  const int ny = grid_.dim == 2 ? grid_.n : 1;
  for (const auto& f : s.fields)
    if (f.nx != grid_.n || f.ny != ny)
      throw Error(Errc::BadState, "state does not match the grid");
}

Field Rhs::lap(const Field& f) {
  if (backend_ == Backend::Fdm) return fdm::laplacian(f, grid_);
  std::vector<spectral::cplx> fhat;
  plan_->forward(f, fhat);
  const auto& k2 = plan_->k2();
  for (size_t m = 0; m < fhat.size(); ++m) fhat[m] *= -k2[m];
  Field out;
  plan_->inverse(fhat, out);
  return out;
}

void Rhs::grad(const Field& f, std::vector<Field>& out) {
  if (backend_ == Backend::Fdm)
    fdm::gradient(f, grid_, out);
  else
    spectral::gradient(*plan_, f, out);
}

Field Rhs::chemo(const Field& u, const Field& v, double chi) {
  if (chi == 0.0) return Field(u.nx, u.ny);
  if (backend_ == Backend::Fdm) return fdm::chemotaxis_div(u, v, chi, grid_);
  std::vector<Field> flux;
  spectral::gradient(*plan_, v, flux);
  for (auto& comp : flux)
    for (size_t i = 0; i < comp.data.size(); ++i)
      comp.data[i] *= u.data[i];
  Field out = spectral::divergence(*plan_, flux);
  for (double& x : out.data) x *= chi;
  return out;
}

Field Rhs::advect_term(const std::vector<Field>& w, const Field& f) {
  if (backend_ == Backend::Fdm) return fdm::advect(w, f, grid_);
  std::vector<Field> df;
  spectral::gradient(*plan_, f, df);
  Field out(f.nx, f.ny);
  for (size_t d = 0; d < df.size(); ++d)
    for (size_t i = 0; i < out.data.size(); ++i)
      out.data[i] += w[d].data[i] * df[d].data[i];
  return out;
}

std::vector<Field> Rhs::velocity_from_hat(
    const std::vector<spectral::cplx>& omega_hat) {
  const auto& k2 = plan_->k2();
  const auto& kx = plan_->kx();
  const auto& ky = plan_->ky();
  // streamfunction: lap(psi) = -omega  =>  psi_hat = omega_hat / k^2
  std::vector<spectral::cplx> what = omega_hat;
  what[0] = spectral::cplx(0.0, 0.0);
  for (size_t m = 1; m < what.size(); ++m) what[m] /= k2[m];
  std::vector<spectral::cplx> cx(what.size()), cy(what.size());
  for (size_t m = 0; m < what.size(); ++m) {
    const spectral::cplx ipsi(-what[m].imag(), what[m].real());  // i psi_hat
    cx[m] = ipsi * ky[m];   // w_x =  d(psi)/dy
    cy[m] = -ipsi * kx[m];  // w_y = -d(psi)/dx
  }
  std::vector<Field> w(2);
  plan_->inverse(cx, w[0]);
  plan_->inverse(cy, w[1]);
  return w;
}

std::vector<Field> Rhs::velocity_internal(const Field& omega) {
  std::vector<spectral::cplx> what;
  plan_->forward(omega, what);
  return velocity_from_hat(what);
}

void Rhs::flow_velocity(const State& s, std::vector<Field>& w) {
  if (model_.family == Family::Fluid1D)
    w = {s.w()};
  else if (model_.family == Family::Fluid2D)
    w = velocity_internal(s.w());
  else
    w.clear();
}

std::vector<Field> Rhs::velocity(const State& s) {
  if (model_.family != Family::Fluid2D)
    throw Error(Errc::BadState,
                "velocity recovery applies to the 2d flow family only");
  check_state(s);
  return velocity_internal(s.w());
}

std::vector<Field> Rhs::full(const State& s) {
  check_state(s);
  const int ns = species_count(model_);
  const Field& v = s.v();
  std::vector<Field> rates(s.fields.size(), Field(v.nx, v.ny));
  std::vector<Field> w;
  flow_velocity(s, w);

  for (int i = 0; i < ns; ++i) {
    const Field& u = s.u(i);
    Field r = lap(u);
    for (double& x : r.data) x *= model_.species[size_t(i)].D;
    axpy(r, -1.0, chemo(u, v, model_.species[size_t(i)].chi));
    if (uses_kinetics())
      for (size_t j = 0; j < r.data.size(); ++j)
        r.data[j] += kinetics::reaction(model_.kinetics, u.data[j]);
    if (!w.empty()) axpy(r, -1.0, advect_term(w, u));
    rates[size_t(i)] = std::move(r);
  }

  Field rv = lap(v);
  for (double& x : rv.data) x *= model_.D_v;
  for (int i = 0; i < ns; ++i)
    axpy(rv, model_.signal.alpha[size_t(i)], s.u(i));
  axpy(rv, -model_.signal.beta, v);
  if (!w.empty()) axpy(rv, -1.0, advect_term(w, v));
  rates[size_t(ns)] = std::move(rv);

  if (model_.family == Family::Fluid1D) {
    Field rw = lap(s.w());
    for (double& x : rw.data) x *= model_.fluid->nu;
    axpy(rw, model_.fluid->kappa, s.u(0));
    rates[size_t(ns) + 1] = std::move(rw);
  } else if (model_.family == Family::Fluid2D) {
    Field rw = lap(s.w());
    for (double& x : rw.data) x *= model_.fluid->nu;
    axpy(rw, -1.0, advect_term(w, s.w()));
    // buoyancy torque kappa (e_g x grad u)_z = kappa (g_x du/dy - g_y du/dx)
    std::vector<Field> du;
    grad(s.u(0), du);
    const double gx = model_.fluid->e_g_x, gy = model_.fluid->e_g_y;
    for (size_t i = 0; i < rw.data.size(); ++i)
      rw.data[i] +=
          model_.fluid->kappa * (gx * du[1].data[i] - gy * du[0].data[i]);
    rates[size_t(ns) + 1] = std::move(rw);
  }
  return rates;
}

std::vector<Field> Rhs::apply_linear(const State& s) {
  check_state(s);
  std::vector<Field> rates(s.fields.size());
  for (size_t j = 0; j < s.fields.size(); ++j) {
    Field r = lap(s.fields[j]);
    for (double& x : r.data) x *= linear_[j].diffusivity;
    axpy(r, -linear_[j].decay, s.fields[j]);
    rates[j] = std::move(r);
  }
  return rates;
}

std::vector<Field> Rhs::nonlinear(const State& s) {
  check_state(s);
  const int ns = species_count(model_);
  const Field& v = s.v();
  std::vector<Field> rates(s.fields.size(), Field(v.nx, v.ny));
  std::vector<Field> w;
  flow_velocity(s, w);

  for (int i = 0; i < ns; ++i) {
    const Field& u = s.u(i);
    Field& r = rates[size_t(i)];
    axpy(r, -1.0, chemo(u, v, model_.species[size_t(i)].chi));
    if (uses_kinetics())
      for (size_t j = 0; j < r.data.size(); ++j)
        r.data[j] += kinetics::reaction(model_.kinetics, u.data[j]);
    if (!w.empty()) axpy(r, -1.0, advect_term(w, u));
  }

  Field& rv = rates[size_t(ns)];
  for (int i = 0; i < ns; ++i)
    axpy(rv, model_.signal.alpha[size_t(i)], s.u(i));
  if (!w.empty()) axpy(rv, -1.0, advect_term(w, v));

  if (model_.family == Family::Fluid1D) {
    axpy(rates[size_t(ns) + 1], model_.fluid->kappa, s.u(0));
  } else if (model_.family == Family::Fluid2D) {
    Field& rw = rates[size_t(ns) + 1];
    axpy(rw, -1.0, advect_term(w, s.w()));
    std::vector<Field> du;
    grad(s.u(0), du);
    const double gx = model_.fluid->e_g_x, gy = model_.fluid->e_g_y;
    for (size_t i = 0; i < rw.data.size(); ++i)
      rw.data[i] +=
          model_.fluid->kappa * (gx * du[1].data[i] - gy * du[0].data[i]);
  }
  return rates;
}

void Rhs::nonlinear_hat(
    const std::vector<std::vector<spectral::cplx>>& fhat,
    std::vector<std::vector<spectral::cplx>>& out, bool dealias) {
  if (backend_ != Backend::Spectral)
    throw Error(Errc::BadState, "mode-space rates need the spectral backend");
  const size_t nf = size_t(field_count(model_));
  const size_t nm = size_t(plan_->n_modes());
  if (fhat.size() != nf)
    throw Error(Errc::BadState, "spectra do not match the model's fields");
  for (const auto& c : fhat)
    if (c.size() != nm)
      throw Error(Errc::BadState, "spectra do not match the grid");

  const int ns = species_count(model_);
  const int dim = grid_.dim;
  const std::vector<double>* kax[2] = {&plan_->kx(), &plan_->ky()};
  out.assign(nf, std::vector<spectral::cplx>(nm, spectral::cplx(0.0, 0.0)));

  // d/dx_a of a half-spectrum, returned in physical space
  std::vector<spectral::cplx> scratch(nm);
  auto axis_deriv = [&](const std::vector<spectral::cplx>& chat, int a,
                        Field& df) {
    const auto& k = *kax[a];
    for (size_t m = 0; m < nm; ++m)
      scratch[m] = spectral::cplx(-chat[m].imag(), chat[m].real()) * k[m];
    plan_->inverse(scratch, df);
  };
  // acc += scale * i k_a fwd(comp_a), summed over axes: a flux divergence
  auto add_flux_div = [&](const std::vector<Field>& flux, double scale,
                          std::vector<spectral::cplx>& acc) {
    for (int a = 0; a < dim; ++a) {
      plan_->forward(flux[size_t(a)], scratch);
      const auto& k = *kax[a];
      for (size_t m = 0; m < nm; ++m)
        acc[m] += scale * spectral::cplx(-scratch[m].imag(), scratch[m].real()) *
                  k[m];
    }
  };

  std::vector<Field> u_phys(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i) plan_->inverse(fhat[size_t(i)], u_phys[size_t(i)]);

  bool any_chi = false;
  for (const auto& sp : model_.species) any_chi |= sp.chi != 0.0;
  const bool flow = model_.family == Family::Fluid1D ||
                    model_.family == Family::Fluid2D;

  std::vector<Field> gv(static_cast<size_t>(dim));  // signal gradient, physical
  if (any_chi || flow)
    for (int a = 0; a < dim; ++a) axis_deriv(fhat[size_t(ns)], a, gv[size_t(a)]);

  std::vector<Field> w;
  if (model_.family == Family::Fluid1D)
    plan_->inverse(fhat[size_t(ns) + 1], w.emplace_back());
  else if (model_.family == Family::Fluid2D)
    w = velocity_from_hat(fhat[size_t(ns) + 1]);

  std::vector<Field> du(static_cast<size_t>(dim));  // per-species advection scratch
  for (int i = 0; i < ns; ++i) {
    const Field& u = u_phys[size_t(i)];
    Field r(u.nx, u.ny);
    bool touched = false;
    if (uses_kinetics()) {
      for (size_t j = 0; j < r.data.size(); ++j)
        r.data[j] = kinetics::reaction(model_.kinetics, u.data[j]);
      touched = true;
    }
    if (flow) {
      for (int a = 0; a < dim; ++a) axis_deriv(fhat[size_t(i)], a, du[size_t(a)]);
      for (int a = 0; a < dim; ++a)
        for (size_t j = 0; j < r.data.size(); ++j)
          r.data[j] -= w[size_t(a)].data[j] * du[size_t(a)].data[j];
      touched = true;
    }
    if (touched) plan_->forward(r, out[size_t(i)]);
    const double chi = model_.species[size_t(i)].chi;
    if (chi != 0.0) {
      std::vector<Field> flux(static_cast<size_t>(dim));
      for (int a = 0; a < dim; ++a) {
        flux[size_t(a)] = gv[size_t(a)];
        for (size_t j = 0; j < u.data.size(); ++j)
          flux[size_t(a)].data[j] *= u.data[j];
      }
      add_flux_div(flux, -chi, out[size_t(i)]);
    }
  }

  // signal production is linear in u: no transform needed
  for (int i = 0; i < ns; ++i) {
    const double alpha = model_.signal.alpha[size_t(i)];
    for (size_t m = 0; m < nm; ++m)
      out[size_t(ns)][m] += alpha * fhat[size_t(i)][m];
  }
  if (flow) {
    Field rv(u_phys[0].nx, u_phys[0].ny);
    for (int a = 0; a < dim; ++a)
      for (size_t j = 0; j < rv.data.size(); ++j)
        rv.data[j] -= w[size_t(a)].data[j] * gv[size_t(a)].data[j];
    plan_->forward(rv, scratch);
    for (size_t m = 0; m < nm; ++m) out[size_t(ns)][m] += scratch[m];
  }

  if (model_.family == Family::Fluid1D) {
    const double kappa = model_.fluid->kappa;
    for (size_t m = 0; m < nm; ++m)
      out[size_t(ns) + 1][m] = kappa * fhat[0][m];
  } else if (model_.family == Family::Fluid2D) {
    Field rw(u_phys[0].nx, u_phys[0].ny);
    Field domega(rw.nx, rw.ny);
    for (int a = 0; a < dim; ++a) {
      axis_deriv(fhat[size_t(ns) + 1], a, domega);
      for (size_t j = 0; j < rw.data.size(); ++j)
        rw.data[j] -= w[size_t(a)].data[j] * domega.data[j];
    }
    // buoyancy torque reuses the species-1 gradient from the advection pass
    const double gx = model_.fluid->e_g_x, gy = model_.fluid->e_g_y;
    const double kappa = model_.fluid->kappa;
    for (size_t j = 0; j < rw.data.size(); ++j)
      rw.data[j] += kappa * (gx * du[1].data[j] - gy * du[0].data[j]);
    plan_->forward(rw, out[size_t(ns) + 1]);
  }

  if (dealias)
    for (auto& c : out) spectral::apply_dealias(*plan_, c);
}

}  // namespace chemotax::models
