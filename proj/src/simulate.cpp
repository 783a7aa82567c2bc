#include "chemotax/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "chemotax/fdm.hpp"
#include "chemotax/io.hpp"
#include "chemotax/kinetics.hpp"

namespace chemotax::simulate {

namespace {

constexpr double kEntropyFloor = 1e-12;

void axpy(Field& y, double a, const Field& x) {
  for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += a * x.data[i];
}

// largest |value| over the species fields; the blow-up detector's input
double species_sup(const State& s) {
  double sup = 0.0;
  for (int i = 0; i < s.n_species; ++i)
    sup = std::max(sup, s.u(i).sup_abs());
  return sup;
}

bool all_finite(const State& s) {
  for (const auto& f : s.fields)
    if (!f.finite()) return false;
  return true;
}

}  // namespace

const char* to_string(TerminationKind kind) {
  switch (kind) {
    case TerminationKind::Completed:
      return "completed";
    case TerminationKind::BlowUp:
      return "blowup";
    case TerminationKind::NonFinite:
      return "nonfinite";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------------

Stepper::Stepper(const ModelSpec& model, const Grid& grid, StepperKind kind,
                 bool dealias, std::optional<ClipRange> clip)
    : kind_(kind),
      dealias_(dealias),
      clip_(clip),
      rhs_(model, grid,
           kind == StepperKind::FdmEuler ? models::Backend::Fdm
                                         : models::Backend::Spectral) {}

void Stepper::refresh(double dt) {
  if (dt == cached_dt_) return;
  const spectral::Plan& plan = *rhs_.plan();
  const auto& parts = rhs_.linear_parts();
  if (kind_ == StepperKind::Ssfm) {
    prop_.resize(parts.size());
    for (size_t j = 0; j < parts.size(); ++j)
      prop_[j] = spectral::linear_propagator(plan, parts[j].diffusivity,
                                             parts[j].decay, dt);
  } else {
    coeffs_.resize(parts.size());
    for (size_t j = 0; j < parts.size(); ++j)
      coeffs_[j] = spectral::etdrk4_coeffs(plan, parts[j].diffusivity,
                                           parts[j].decay, dt);
  }
  cached_dt_ = dt;
}

void Stepper::apply_clip(State& s) {
  if (!clip_) return;
  for (int i = 0; i < s.n_species; ++i)
    for (auto& x : s.u(i).data) x = std::clamp(x, clip_->lo, clip_->hi);
}

void Stepper::step(State& s, double dt) {
  switch (kind_) {
    case StepperKind::FdmEuler:
      step_euler(s, dt);
      break;
    case StepperKind::Ssfm:
      step_ssfm(s, dt);
      break;
    case StepperKind::Etdrk4:
      step_etdrk4(s, dt);
      break;
  }
  apply_clip(s);
}

void Stepper::step_euler(State& s, double dt) {
  std::vector<Field> rates = rhs_.full(s);
  for (size_t j = 0; j < s.fields.size(); ++j)
    axpy(s.fields[j], dt, rates[j]);
}

void Stepper::step_ssfm(State& s, double dt) {
  refresh(dt);
  const spectral::Plan& plan = *rhs_.plan();
  std::vector<spectral::cplx> fhat;
  for (size_t j = 0; j < s.fields.size(); ++j) {
    plan.forward(s.fields[j], fhat);
    for (size_t m = 0; m < fhat.size(); ++m) fhat[m] *= prop_[j][m];
    if (dealias_) spectral::apply_dealias(plan, fhat);
    plan.inverse(fhat, s.fields[j]);
  }
  std::vector<Field> rates = rhs_.nonlinear(s);
  for (size_t j = 0; j < s.fields.size(); ++j)
    axpy(s.fields[j], dt, rates[j]);
}

void Stepper::step_etdrk4(State& s, double dt) {
  refresh(dt);
  const spectral::Plan& plan = *rhs_.plan();
  const size_t nf = s.fields.size();
  const size_t nm = size_t(plan.n_modes());

  vhat_.resize(nf);
  ahat_.assign(nf, std::vector<spectral::cplx>(nm));
  bhat_.assign(nf, std::vector<spectral::cplx>(nm));
  chat_.assign(nf, std::vector<spectral::cplx>(nm));
  for (size_t j = 0; j < nf; ++j) {
    plan.forward(s.fields[j], vhat_[j]);
    if (dealias_) spectral::apply_dealias(plan, vhat_[j]);
  }

  rhs_.nonlinear_hat(vhat_, nv_, dealias_);
  for (size_t j = 0; j < nf; ++j) {
    const auto& c = coeffs_[j];
    for (size_t m = 0; m < nm; ++m)
      ahat_[j][m] = c.E2[m] * vhat_[j][m] + c.Q[m] * nv_[j][m];
  }
  rhs_.nonlinear_hat(ahat_, na_, dealias_);
  for (size_t j = 0; j < nf; ++j) {
    const auto& c = coeffs_[j];
    for (size_t m = 0; m < nm; ++m)
      bhat_[j][m] = c.E2[m] * vhat_[j][m] + c.Q[m] * na_[j][m];
  }
  rhs_.nonlinear_hat(bhat_, nb_, dealias_);
  for (size_t j = 0; j < nf; ++j) {
    const auto& c = coeffs_[j];
    for (size_t m = 0; m < nm; ++m)
      chat_[j][m] =
          c.E2[m] * ahat_[j][m] + c.Q[m] * (2.0 * nb_[j][m] - nv_[j][m]);
  }
  rhs_.nonlinear_hat(chat_, nc_, dealias_);
  for (size_t j = 0; j < nf; ++j) {
    const auto& c = coeffs_[j];
    for (size_t m = 0; m < nm; ++m)
      vhat_[j][m] = c.E[m] * vhat_[j][m] + c.f1[m] * nv_[j][m] +
                    2.0 * c.f2[m] * (na_[j][m] + nb_[j][m]) +
                    c.f3[m] * nc_[j][m];
    plan.inverse(vhat_[j], s.fields[j]);
  }
}

// ---------------------------------------------------------------------------
// Initial state
// ---------------------------------------------------------------------------

State initial_state(const RunConfig& cfg) {
  State s = make_state(cfg.model, cfg.grid);
  const Grid& g = cfg.grid;
  const InitialCondition& ic = cfg.ic;
  const int ns = s.n_species;

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> noise(-ic.noise_amplitude,
                                               ic.noise_amplitude);
  auto add_noise_and_clamp = [&]() {
    if (ic.noise_amplitude > 0.0)
      for (int i = 0; i < ns; ++i)
        for (auto& x : s.u(i).data) x += noise(rng);
    for (int i = 0; i < ns; ++i)
      for (auto& x : s.u(i).data) x = std::max(x, 0.0);
  };

  switch (ic.kind) {
    case InitialCondition::Kind::UniformPlusNoise: {
      for (size_t j = 0; j < s.fields.size(); ++j)
        for (auto& x : s.fields[j].data) x = ic.base[j];
      add_noise_and_clamp();
      break;
    }
    case InitialCondition::Kind::Gaussian: {
      std::vector<double> c(size_t(g.dim), 0.5 * g.length);
      for (size_t d = 0; d < ic.center.size(); ++d) c[d] = ic.center[d];
      const double s2 = 2.0 * ic.width * ic.width;
      Field& u = s.u(0);
      Field& v = s.v();
      const int ny = g.dim == 2 ? g.n : 1;
      for (int iy = 0; iy < ny; ++iy) {
        const double ry = g.dim == 2 ? g.coord(iy) - c[1] : 0.0;
        for (int ix = 0; ix < g.n; ++ix) {
          const double rx = g.coord(ix) - c[0];
          const double bump = std::exp(-(rx * rx + ry * ry) / s2);
          u.at(ix, iy) = ic.peak * bump;
          v.at(ix, iy) = ic.v_peak * bump;
        }
      }
      add_noise_and_clamp();
      break;
    }
    case InitialCondition::Kind::Explicit: {
      for (size_t j = 0; j < s.fields.size(); ++j)
        s.fields[j].data = ic.fields[j];
      break;
    }
  }
  s.t = 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

std::vector<double> mass(const State& s, const Grid& grid) {
  std::vector<double> out(size_t(s.n_species));
  for (int i = 0; i < s.n_species; ++i)
    out[size_t(i)] = fdm::integral(s.u(i), grid);
  return out;
}

double entropy(const State& s, const ModelSpec& model, const Grid& grid,
               bool* floored) {
  const Field& u = s.u(0);
  const Field& v = s.v();
  const double ratio = model.species[0].chi / model.species[0].D;
  bool hit = false;
  Field integrand(u.nx, u.ny);
  for (size_t i = 0; i < u.data.size(); ++i) {
    const double ui = u.data[i];
    const double vi = v.data[i];
    hit |= ui < kEntropyFloor;
    integrand.data[i] = ui * std::log(std::max(ui, kEntropyFloor)) - ui +
                        ratio * ui * vi + 0.5 * vi * vi;
  }
  if (floored) *floored = hit;
  return fdm::integral(integrand, grid);
}

double free_energy(const State& s, const ModelSpec& model, const Grid& grid,
                   const spectral::Plan& plan) {
  if (grid.boundary != Boundary::Periodic)
    throw Error(Errc::UnsupportedBoundary,
                "the interaction potential needs a periodic grid");
  const Field& u = s.u(0);
  Field phi = spectral::poisson_solve_periodic(plan, u);
  Field integrand(u.nx, u.ny);
  for (size_t i = 0; i < u.data.size(); ++i) {
    const double ui = u.data[i];
    integrand.data[i] = ui * std::log(std::max(ui, kEntropyFloor)) - ui;
  }
  double f = fdm::integral(integrand, grid);
  for (size_t i = 0; i < u.data.size(); ++i)
    integrand.data[i] = u.data[i] * phi.data[i];
  f -= model.species[0].chi / (2.0 * model.signal.beta) *
       fdm::integral(integrand, grid);
  return f;
}

double second_moment(const State& s, const Grid& grid) {
  const Field& u = s.u(0);
  const double xc = 0.5 * grid.length;
  Field integrand(u.nx, u.ny);
  for (int iy = 0; iy < u.ny; ++iy) {
    const double ry = grid.dim == 2 ? grid.coord(iy) - xc : 0.0;
    for (int ix = 0; ix < u.nx; ++ix) {
      const double rx = grid.coord(ix) - xc;
      integrand.at(ix, iy) = (rx * rx + ry * ry) * u.at(ix, iy);
    }
  }
  return fdm::integral(integrand, grid);
}

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

RunRecord run(const RunConfig& cfg) {
  require_valid(cfg);
  const auto t_start = std::chrono::steady_clock::now();

  RunRecord rec;
  rec.cfg = cfg;
  State s = initial_state(cfg);
  Stepper stepper(cfg.model, cfg.grid, cfg.stepper, cfg.dealias_effective(),
                  cfg.clip);

  // the potential solve reuses the stepper's plan when it has one
  const spectral::Plan* plan = stepper.rhs().plan();
  std::unique_ptr<spectral::Plan> local_plan;
  if (cfg.record_free_energy && !plan) {
    local_plan = std::make_unique<spectral::Plan>(cfg.grid);
    plan = local_plan.get();
  }

  if (cfg.stepper == StepperKind::FdmEuler) {
    double sup_w = 0.0;
    if (cfg.model.family == Family::Fluid1D) {
      sup_w = s.w().sup_abs();
    } else if (cfg.model.family == Family::Fluid2D) {
      for (const auto& comp : stepper.rhs().velocity(s))
        sup_w = std::max(sup_w, comp.sup_abs());
    }
    fdm::CflLimits lim =
        fdm::cfl_limits(cfg.model, cfg.grid, species_sup(s), sup_w);
    if (cfg.dt > lim.dt())
      rec.warnings.push_back("dt " + format_double(cfg.dt) +
                             " exceeds the cfl limit " +
                             format_double(lim.dt()) +
                             " of the initial state");
  }

  const int nf = field_count(cfg.model);
  const int mid = cfg.grid.n / 2;
  if (cfg.record_midpoint)
    rec.series.midpoint.assign(size_t(nf), {});
  rec.series.mass.assign(size_t(species_count(cfg.model)), {});

  bool entropy_floored = false;
  auto record_scalars = [&](const State& st) {
    rec.series.t.push_back(st.t);
    std::vector<double> m = mass(st, cfg.grid);
    for (size_t i = 0; i < m.size(); ++i) rec.series.mass[i].push_back(m[i]);
    rec.series.sup_u.push_back(species_sup(st));
    bool hit = false;
    rec.series.entropy.push_back(entropy(st, cfg.model, cfg.grid, &hit));
    entropy_floored |= hit;
    rec.series.second_moment.push_back(second_moment(st, cfg.grid));
    if (cfg.record_free_energy)
      rec.series.free_energy.push_back(
          free_energy(st, cfg.model, cfg.grid, *plan));
    if (cfg.record_midpoint)
      for (int j = 0; j < nf; ++j)
        rec.series.midpoint[size_t(j)].push_back(
            st.fields[size_t(j)].at(mid, cfg.grid.dim == 2 ? mid : 0));
  };
  auto snapshot = [&](const State& st) {
    rec.snapshot_times.push_back(st.t);
    rec.snapshots.push_back(st.fields);
  };

  record_scalars(s);
  snapshot(s);

  const long long n_steps = std::llround(cfg.t_final / cfg.dt);
  for (long long i = 1; i <= n_steps; ++i) {
    stepper.step(s, cfg.dt);
    s.t = double(i) * cfg.dt;

    const bool finite = all_finite(s);
    const double sup = species_sup(s);
    const bool exploded = finite && sup >= cfg.blowup_threshold;
    const bool last = i == n_steps;

    record_scalars(s);
    if (i % cfg.snapshot_every == 0 || last || !finite || exploded)
      snapshot(s);

    if (!finite) {
      rec.termination = {TerminationKind::NonFinite, s.t};
      break;
    }
    if (exploded) {
      rec.termination = {TerminationKind::BlowUp, s.t};
      break;
    }
    if (last) rec.termination = {TerminationKind::Completed, s.t};
  }

  if (entropy_floored)
    rec.warnings.push_back("entropy floor 1e-12 applied to the log term");

  rec.final_state = std::move(s);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rec;
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

std::string series_csv(const RunRecord& rec) {
  const SeriesTable& se = rec.series;
  std::vector<std::string> cols = {"t"};
  for (size_t i = 0; i < se.mass.size(); ++i)
    cols.push_back("mass_" + std::to_string(i + 1));
  cols.push_back("sup_u");
  cols.push_back("entropy");
  if (!se.free_energy.empty()) cols.push_back("free_energy");
  cols.push_back("second_moment");
  std::vector<std::string> names = field_names(rec.cfg.model);
  if (!se.midpoint.empty())
    for (const auto& n : names) cols.push_back(n + "_mid");

  CsvBuilder csv(cols);
  std::vector<double> row;
  for (size_t r = 0; r < se.rows(); ++r) {
    row.clear();
    row.push_back(se.t[r]);
    for (const auto& m : se.mass) row.push_back(m[r]);
    row.push_back(se.sup_u[r]);
    row.push_back(se.entropy[r]);
    if (!se.free_energy.empty()) row.push_back(se.free_energy[r]);
    row.push_back(se.second_moment[r]);
    for (const auto& col : se.midpoint) row.push_back(col[r]);
    csv.add_row(row);
  }
  return csv.str();
}

std::string snapshot_csv(const Field& f, const Grid& grid, double t) {
  std::string out = "nx,ny,L,t\n";
  out += std::to_string(f.nx) + "," + std::to_string(f.ny) + "," +
         format_double(grid.length) + "," + format_double(t) + "\n";
  for (int iy = 0; iy < f.ny; ++iy) {
    for (int ix = 0; ix < f.nx; ++ix) {
      if (ix) out += ',';
      out += format_double(f.at(ix, iy));
    }
    out += '\n';
  }
  return out;
}

}  // namespace chemotax::simulate
