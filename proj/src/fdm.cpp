#include "chemotax/fdm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chemotax::fdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shape(const Field& f, const Grid& grid) {
  const int ny = grid.dim == 2 ? grid.n : 1;
  if (f.nx != grid.n || f.ny != ny)
    throw Error(Errc::BadState, "field does not match the grid");
}

// second difference along one axis at a line of nodes; `get` indexes
// the axis, results accumulate into `add`
template <typename Get, typename Add>
void second_diff_line(int n, double inv_dx2, Boundary bc, const Get& get,
                      const Add& add) {
  // (left + right) - 2 mid: the commutative association keeps
  // mirror-symmetric inputs bitwise symmetric in the output
  if (bc == Boundary::Periodic) {
    for (int i = 0; i < n; ++i) {
      double left = get(i == 0 ? n - 1 : i - 1);
      double right = get(i == n - 1 ? 0 : i + 1);
      add(i, ((left + right) - 2.0 * get(i)) * inv_dx2);
    }
  } else {
    // even reflection: ghost mirrors the first interior value
    add(0, 2.0 * (get(1) - get(0)) * inv_dx2);
    for (int i = 1; i < n - 1; ++i)
      add(i, ((get(i - 1) + get(i + 1)) - 2.0 * get(i)) * inv_dx2);
    add(n - 1, 2.0 * (get(n - 2) - get(n - 1)) * inv_dx2);
  }
}

// conservative flux divergence of u grad(v) along one axis;
// half-cell volumes at Neumann boundary nodes keep the trapezoid
// integral exactly conserved
template <typename GetU, typename GetV, typename Add>
void flux_div_line(int n, double dx, Boundary bc, const GetU& u,
                   const GetV& v, const Add& add) {
  const double inv_dx = 1.0 / dx;
  auto face = [&](int i, int j) {  // flux through the face between i, j
    return 0.5 * (u(i) + u(j)) * (v(j) - v(i)) * inv_dx;
  };
  if (bc == Boundary::Periodic) {
    double f_prev = face(n - 1, 0);
    for (int i = 0; i < n; ++i) {
      double f_next = face(i, i == n - 1 ? 0 : i + 1);
      add(i, (f_next - f_prev) * inv_dx);
      f_prev = f_next;
    }
  } else {
    double f_prev = 0.0;  // zero-flux boundary face
    for (int i = 0; i < n; ++i) {
      double f_next = i == n - 1 ? 0.0 : face(i, i + 1);
      double vol = (i == 0 || i == n - 1) ? 0.5 * dx : dx;
      add(i, (f_next - f_prev) * dx * inv_dx / vol);
      f_prev = f_next;
    }
  }
}

// central first difference along one axis; Neumann edges are exactly
// zero under even reflection
template <typename Get, typename Add>
void central_diff_line(int n, double dx, Boundary bc, const Get& get,
                       const Add& add) {
  const double half_inv = 0.5 / dx;
  if (bc == Boundary::Periodic) {
    for (int i = 0; i < n; ++i) {
      double left = get(i == 0 ? n - 1 : i - 1);
      double right = get(i == n - 1 ? 0 : i + 1);
      add(i, (right - left) * half_inv);
    }
  } else {
    add(0, 0.0);
    for (int i = 1; i < n - 1; ++i)
      add(i, (get(i + 1) - get(i - 1)) * half_inv);
    add(n - 1, 0.0);
  }
}

}  // namespace

Field laplacian(const Field& f, const Grid& grid) {
  check_shape(f, grid);
  const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
  Field out(f.nx, f.ny);
  for (int iy = 0; iy < f.ny; ++iy)
    second_diff_line(
        f.nx, inv_dx2, grid.boundary, [&](int ix) { return f.at(ix, iy); },
        [&](int ix, double val) { out.at(ix, iy) += val; });
  if (grid.dim == 2)
    for (int ix = 0; ix < f.nx; ++ix)
      second_diff_line(
          f.ny, inv_dx2, grid.boundary, [&](int iy) { return f.at(ix, iy); },
          [&](int iy, double val) { out.at(ix, iy) += val; });
  return out;
}

Field chemotaxis_div(const Field& u, const Field& v, double chi,
                     const Grid& grid) {
  check_shape(u, grid);
  check_shape(v, grid);
  const double dx = grid.dx();
  Field out(u.nx, u.ny);
  for (int iy = 0; iy < u.ny; ++iy)
    flux_div_line(
        u.nx, dx, grid.boundary, [&](int ix) { return u.at(ix, iy); },
        [&](int ix) { return v.at(ix, iy); },
        [&](int ix, double val) { out.at(ix, iy) += val; });
  if (grid.dim == 2)
    for (int ix = 0; ix < u.nx; ++ix)
      flux_div_line(
          u.ny, dx, grid.boundary, [&](int iy) { return u.at(ix, iy); },
          [&](int iy) { return v.at(ix, iy); },
          [&](int iy, double val) { out.at(ix, iy) += val; });
  if (chi != 1.0)
    for (double& x : out.data) x *= chi;
  return out;
}

void gradient(const Field& f, const Grid& grid, std::vector<Field>& out) {
  check_shape(f, grid);
  const double dx = grid.dx();
  out.assign(size_t(grid.dim), Field(f.nx, f.ny));
  for (int iy = 0; iy < f.ny; ++iy)
    central_diff_line(
        f.nx, dx, grid.boundary, [&](int ix) { return f.at(ix, iy); },
        [&](int ix, double val) { out[0].at(ix, iy) = val; });
  if (grid.dim == 2)
    for (int ix = 0; ix < f.nx; ++ix)
      central_diff_line(
          f.ny, dx, grid.boundary, [&](int iy) { return f.at(ix, iy); },
          [&](int iy, double val) { out[1].at(ix, iy) = val; });
}

Field advect(const std::vector<Field>& w, const Field& f, const Grid& grid) {
  if (int(w.size()) != grid.dim)
    throw Error(Errc::BadState, "advection needs grid.dim components");
  std::vector<Field> df;
  gradient(f, grid, df);
  Field out(f.nx, f.ny);
  for (int d = 0; d < grid.dim; ++d)
    for (size_t i = 0; i < out.data.size(); ++i)
      out.data[i] += w[size_t(d)].data[i] * df[size_t(d)].data[i];
  return out;
}

double CflLimits::dt() const {
  return std::min({dt_diffusion, dt_chemotaxis, dt_advection});
}

CflLimits cfl_limits(const ModelSpec& model, const Grid& grid, double sup_u,
                     double sup_w) {
  double d_max = model.D_v;
  double chi_max = 0.0;
  for (const auto& sp : model.species) {
    d_max = std::max(d_max, sp.D);
    chi_max = std::max(chi_max, std::fabs(sp.chi));
  }
  if (model.fluid) d_max = std::max(d_max, model.fluid->nu);

  const double dx = grid.dx();
  CflLimits lim{kInf, kInf, kInf};
  if (d_max > 0.0) lim.dt_diffusion = dx * dx / (2.0 * grid.dim * d_max);
  if (chi_max > 0.0 && sup_u > 0.0)
    lim.dt_chemotaxis = 0.25 * dx * dx / (chi_max * sup_u);
  if (sup_w > 0.0) lim.dt_advection = 0.5 * dx / sup_w;
  return lim;
}

double integral(const Field& f, const Grid& grid) {
  check_shape(f, grid);
  const double vol = grid.cell_volume();
  if (grid.boundary == Boundary::Periodic) {
    double s = 0.0;
    for (double x : f.data) s += x;
    return s * vol;
  }
  double s = 0.0;
  for (int iy = 0; iy < f.ny; ++iy) {
    double wy = grid.dim == 2 && (iy == 0 || iy == f.ny - 1) ? 0.5 : 1.0;
    for (int ix = 0; ix < f.nx; ++ix) {
      double wx = (ix == 0 || ix == f.nx - 1) ? 0.5 : 1.0;
      s += wx * wy * f.at(ix, iy);
    }
  }
  return s * vol;
}

}  // namespace chemotax::fdm
