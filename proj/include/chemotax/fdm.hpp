#pragma once

// Finite-difference spatial operators on uniform 1d/2d grids with
// periodic or zero-flux (Neumann) closure: Laplacian, gradient,
// conservative chemotaxis flux divergence, advection, stability
// limits, and the matching discrete integral.
//
// Neumann closure uses even-reflection ghosts (the ghost mirrors the
// first interior value), which makes zero-flux cosine modes exact
// discrete eigenvectors. Boundary nodes own half cells, so the flux
// forms conserve the trapezoid integral exactly; on periodic grids the
// plain sum telescopes instead.

#include <vector>

#include "chemotax/core.hpp"

namespace chemotax::fdm {

/// Second-order central Laplacian (five-point stencil in 2d).
Field laplacian(const Field& f, const Grid& grid);

/// chi * div(u grad v) as a difference of face fluxes
/// F_{i+1/2} = ((u_{i+1}+u_i)/2)(v_{i+1}-v_i)/dx, per axis in 2d.
/// Neumann faces carry zero flux and boundary nodes half-cell volume.
Field chemotaxis_div(const Field& u, const Field& v, double chi,
                     const Grid& grid);

/// Central-difference gradient; out receives grid.dim components.
/// Neumann boundary nodes return exactly zero (even reflection).
void gradient(const Field& f, const Grid& grid, std::vector<Field>& out);

/// w . grad(f) with central differences; w holds grid.dim components.
Field advect(const std::vector<Field>& w, const Field& f, const Grid& grid);

/// Explicit-step stability bounds. Any inactive mechanism reports
/// +infinity; dt() is the overall minimum.
struct CflLimits {
  double dt_diffusion;
  double dt_chemotaxis;
  double dt_advection;
  double dt() const;
};

/// dt_diffusion = dx^2 / (2 d D_max) over every diffusivity in play
/// (species, signal, viscosity); dt_chemotaxis = 0.25 dx^2 /
/// (|chi|_max sup_u); dt_advection = 0.5 dx / sup_w.
CflLimits cfl_limits(const ModelSpec& model, const Grid& grid, double sup_u,
                     double sup_w = 0.0);

/// Discrete integral with the quadrature matching the closure:
/// uniform cell weights on periodic grids, trapezoid weights (half
/// cells at boundaries) on Neumann grids.
double integral(const Field& f, const Grid& grid);

}  // namespace chemotax::fdm
