#include "chemotax/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "chemotax/fdm.hpp"
#include "chemotax/io.hpp"
#include "chemotax/linstab.hpp"
#include "chemotax/spectral.hpp"

namespace chemotax::experiments {

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CHEMOTAX_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0 &&
        n <= std::numeric_limits<int>::max())
      return int(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

namespace {

// One sweep point: run the base config at this chi and reduce the
// record to final-time maxima. Early-terminated runs report the
// threshold as max_u (all columns when finiteness was lost) so the
// CSV stays finite and comparable.
struct SweepPoint {
  double max_u = 0.0;
  double max_v = 0.0;
  double max_w = 0.0;
  bool flagged = false;
};

SweepPoint sweep_point(RunConfig cfg, double chi) {
  cfg.model.species.at(0).chi = chi;
  cfg.snapshot_every = std::numeric_limits<int>::max();
  cfg.record_midpoint = false;
  cfg.record_free_energy = false;
  const simulate::RunRecord rec = simulate::run(cfg);

  SweepPoint p;
  const State& fs = rec.final_state;
  p.max_u = fs.u(0).sup_abs();
  p.max_v = fs.v().sup_abs();
  p.max_w = fs.flow ? fs.w().sup_abs() : 0.0;
  switch (rec.termination.kind) {
    case simulate::TerminationKind::Completed:
      break;
    case simulate::TerminationKind::BlowUp:
      p.flagged = true;
      p.max_u = cfg.blowup_threshold;
      break;
    case simulate::TerminationKind::NonFinite:
      p.flagged = true;
      p.max_u = cfg.blowup_threshold;
      p.max_v = cfg.blowup_threshold;
      p.max_w = fs.flow ? cfg.blowup_threshold : 0.0;
      break;
  }
  return p;
}

}  // namespace

SweepResult bifurcation_sweep(const RunConfig& base,
                              std::vector<double> chis, int workers) {
  std::sort(chis.begin(), chis.end());
  const size_t n = chis.size();
  std::vector<SweepPoint> points(n);

  const int nw = std::min<int>(resolve_workers(workers),
                               int(std::max<size_t>(n, 1)));
  if (nw <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) points[i] = sweep_point(base, chis[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(nw));
    auto drain = [&](size_t slot) {
      try {
        for (size_t i; (i = next.fetch_add(1)) < n;)
          points[i] = sweep_point(base, chis[i]);
      } catch (...) {
        errors[slot] = std::current_exception();
        next.store(n);  // stop handing out further points
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(size_t(nw));
    for (int t = 0; t < nw; ++t) pool.emplace_back(drain, size_t(t));
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  SweepResult res;
  res.chis = std::move(chis);
  res.max_u.reserve(n);
  res.max_v.reserve(n);
  res.max_w.reserve(n);
  res.terminated_early.reserve(n);
  for (const auto& p : points) {
    res.max_u.push_back(p.max_u);
    res.max_v.push_back(p.max_v);
    res.max_w.push_back(p.max_w);
    res.terminated_early.push_back(p.flagged);
  }
  if (n > 0) {
    const double baseline = res.max_u.front();
    for (size_t i = 0; i < n; ++i)
      if (res.max_u[i] > 2.0 * baseline) {
        res.transition_estimate = res.chis[i];
        break;
      }
  }
  return res;
}

std::string sweep_csv(const SweepResult& result) {
  CsvBuilder csv({"chi", "max_u", "max_v", "max_w", "terminated_early"});
  for (size_t i = 0; i < result.chis.size(); ++i)
    csv.add_row({result.chis[i], result.max_u[i], result.max_v[i],
                 result.max_w[i], result.terminated_early[i] ? 1.0 : 0.0});
  return csv.str();
}

std::string dispersion_export(const ModelSpec& model,
                              const std::vector<double>& chis, double k_hi,
                              int samples) {
  const SteadyState steady = homogeneous_steady_state(model);
  const double alpha =
      model.signal.alpha.empty() ? 0.0 : model.signal.alpha[0];
  CsvBuilder csv({"chi", "k", "re_lambda", "im_lambda", "re_simplified"});
  for (const double chi : chis) {
    ModelSpec m = model;
    m.species.at(0).chi = chi;
    const linstab::DispersionScan scan =
        linstab::dispersion_scan(m, steady.u.at(0), k_hi, samples);
    for (size_t i = 0; i < scan.k.size(); ++i) {
      const double simplified = linstab::simplified_dispersion(
          scan.k[i], chi, model.species[0].D, alpha, model.signal.beta);
      csv.add_row({chi, scan.k[i], scan.re[i], scan.im[i], simplified});
    }
  }
  return csv.str();
}

MassProbe critical_mass_probe(double D, double chi,
                              const std::vector<double>& masses,
                              const Grid& grid, double t_final,
                              double width) {
  if (grid.dim != 2)
    throw Error(Errc::BadGrid, "critical mass probe needs a plane grid");
  if (!(width > 0.0))
    throw Error(Errc::BadValue, "critical mass probe needs width > 0");

  ModelSpec model;
  model.family = Family::KsLogistic;
  model.species = {{D, chi}};
  model.D_v = 1.0;
  model.signal.alpha = {1.0};
  model.signal.beta = 1.0;

  MassProbe probe;
  probe.masses = masses;
  probe.verdicts.reserve(masses.size());
  for (const double mass : masses) {
    if (!(mass > 0.0))
      throw Error(Errc::BadValue, "critical mass probe needs masses > 0");
    Field bump = make_field(grid);
    const double xc = 0.5 * grid.length;
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix) {
        const double rx = grid.coord(ix) - xc;
        const double ry = grid.coord(iy) - xc;
        bump.at(ix, iy) =
            std::exp(-(rx * rx + ry * ry) / (2.0 * width * width));
      }
    const double scale = mass / fdm::integral(bump, grid);
    for (double& value : bump.data) value *= scale;
    const double sup0 = bump.sup_abs();

    // Aggregated = grew past twenty times the starting height. The
    // fixed step is sized for that level, so it stays stable until
    // the verdict is in.
    const double threshold = 20.0 * sup0;
    RunConfig cfg;
    cfg.grid = grid;
    cfg.model = model;
    cfg.stepper = StepperKind::FdmEuler;
    cfg.dt = 0.5 * fdm::cfl_limits(model, grid, threshold).dt();
    cfg.t_final = t_final;
    cfg.snapshot_every = std::numeric_limits<int>::max();
    cfg.blowup_threshold = threshold;
    cfg.ic.kind = InitialCondition::Kind::Explicit;
    cfg.ic.fields = {bump.data,
                     std::vector<double>(bump.data.size(), 0.0)};
    probe.verdicts.push_back(simulate::run(cfg).termination.kind);
  }
  return probe;
}

OscillationReport classify_series(const std::vector<double>& series,
                                  double dt) {
  if (series.size() < 64)
    throw Error(Errc::BadState,
                "oscillation analysis needs at least 64 samples");
  if (!(dt > 0.0))
    throw Error(Errc::BadValue, "oscillation analysis needs dt > 0");

  // Analysis window: largest power-of-two block inside the second
  // half of the series, taken from the settled end.
  const size_t half = series.size() / 2;
  size_t n = 32;
  while (n * 2 <= half) n *= 2;
  const size_t start = series.size() - n;

  double mean = 0.0;
  double level = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mean += series[start + i];
    level += std::abs(series[start + i]);
  }
  mean /= double(n);
  level /= double(n);

  const Grid grid{1, int(n), 1.0, Boundary::Periodic};
  const spectral::Plan plan(grid);
  Field window(int(n), 1);
  for (size_t i = 0; i < n; ++i) window.data[i] = series[start + i] - mean;
  std::vector<spectral::cplx> hat;
  plan.forward(window, hat);

  double peak = 0.0;
  size_t peak_mode = 0;
  std::vector<double> mags;
  mags.reserve(hat.size() - 1);
  for (size_t m = 1; m < hat.size(); ++m) {
    const double mag = std::abs(hat[m]);
    mags.push_back(mag);
    if (mag > peak) {
      peak = mag;
      peak_mode = m;
    }
  }
  const size_t mid = mags.size() / 2;
  std::nth_element(mags.begin(), mags.begin() + long(mid), mags.end());
  const double median = mags[mid];

  OscillationReport rep;
  rep.peak_ratio = peak / std::max(median, 1e-300);
  rep.frequency = double(peak_mode) / (double(n) * dt);
  // A peak only counts when its implied amplitude is visible next to
  // the series level: sub-roundoff ripple reads as settled.
  const double amplitude = 2.0 * peak / double(n);
  const double floor = 1e-8 * std::max(level, 1e-300);
  rep.oscillatory = peak > 0.0 && rep.peak_ratio >= 5.0 &&
                    amplitude >= floor;
  return rep;
}

OscillationReport hopf_probe(const ModelSpec& model, double chi,
                             double t_final) {
  if (model.family != Family::KsLogistic)
    throw Error(Errc::BadState,
                "the oscillation probe runs the one-species logistic family");
  RunConfig cfg;
  cfg.grid = {1, 128, 10.0, Boundary::Periodic};
  cfg.model = model;
  cfg.model.species.at(0).chi = chi;
  cfg.stepper = StepperKind::Ssfm;
  cfg.dt = 0.01;
  cfg.t_final = t_final;
  cfg.snapshot_every = std::numeric_limits<int>::max();
  cfg.record_midpoint = true;
  cfg.rng_seed = 2026;
  const SteadyState steady = homogeneous_steady_state(cfg.model);
  cfg.ic.kind = InitialCondition::Kind::UniformPlusNoise;
  cfg.ic.base = {steady.u.at(0), steady.v};
  cfg.ic.noise_amplitude = 1e-3;

  const simulate::RunRecord rec = simulate::run(cfg);
  return classify_series(rec.series.midpoint.at(0), cfg.dt);
}

}  // namespace chemotax::experiments
