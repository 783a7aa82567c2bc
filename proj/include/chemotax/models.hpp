#pragma once

// Right-hand-side assembly for the four model families, over either
// finite-difference or pseudo-spectral space operators. Exposes the
// full rates, and separately the stiff linear coefficients plus the
// physical-space nonlinear remainder used by the split steppers; the
// two decompositions are assembled independently so their sum can be
// cross-checked.

#include <complex>
#include <memory>
#include <vector>

#include "chemotax/core.hpp"
#include "chemotax/spectral.hpp"

namespace chemotax::models {

enum class Backend { Fdm, Spectral };

/// Per-field stiff linear coefficients: rate += diffusivity * lap(f)
/// - decay * f. Reaction terms stay in the nonlinear remainder.
struct LinearPart {
  double diffusivity = 0.0;
  double decay = 0.0;
};

class Rhs {
 public:
  /// Builds the operator set for one model on one grid. A spectral
  /// plan is created for the spectral backend and always for the 2d
  /// flow family (velocity recovery is spectral regardless of
  /// backend), so those combinations require a periodic power-of-two
  /// grid.
  Rhs(const ModelSpec& model, const Grid& grid, Backend backend);

  const ModelSpec& model() const { return model_; }
  const Grid& grid() const { return grid_; }
  Backend backend() const { return backend_; }
  const std::vector<LinearPart>& linear_parts() const { return linear_; }
  /// Non-null whenever spectral operators are in play.
  const spectral::Plan* plan() const { return plan_.get(); }

  /// Complete rates for every field, assembled directly.
  std::vector<Field> full(const State& s);
  /// Stiff linear part only: diffusivity * lap - decay, per field.
  std::vector<Field> apply_linear(const State& s);
  /// Nonlinear remainder: chemotactic flux divergence, reaction,
  /// signal production, advection, buoyancy forcing.
  std::vector<Field> nonlinear(const State& s);

  /// Nonlinear remainder evaluated mode-to-mode on half-spectra, for
  /// steppers that keep their stage states in spectral space. Agrees
  /// with transforming nonlinear() to roundoff; `dealias` applies the
  /// 2/3-rule mask to the result. Spectral backend only.
  void nonlinear_hat(
      const std::vector<std::vector<std::complex<double>>>& fhat,
      std::vector<std::vector<std::complex<double>>>& out, bool dealias);

  /// 2d flow family only: velocity from the vorticity field through
  /// the streamfunction (divergence-free by construction).
  std::vector<Field> velocity(const State& s);

 private:
  Field lap(const Field& f);
  void grad(const Field& f, std::vector<Field>& out);
  Field chemo(const Field& u, const Field& v, double chi);
  Field advect_term(const std::vector<Field>& w, const Field& f);
  std::vector<Field> velocity_from_hat(
      const std::vector<std::complex<double>>& omega_hat);
  std::vector<Field> velocity_internal(const Field& omega);
  void flow_velocity(const State& s, std::vector<Field>& w);
  bool uses_kinetics() const;
  void check_state(const State& s) const;

  ModelSpec model_;
  Grid grid_;
  Backend backend_;
  std::vector<LinearPart> linear_;
  std::unique_ptr<spectral::Plan> plan_;
};

}  // namespace chemotax::models
