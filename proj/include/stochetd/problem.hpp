#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "stochetd/errors.hpp"
#include "stochetd/state.hpp"

namespace stochetd {

/// Drift/diffusion field: (t, u) -> vector.
using Field = std::function<StateVector(double, const StateVector&)>;

/// One time step together with the Brownian increments that drive it.
struct Increment {
  double dt = 0.0;
  std::vector<double> dw;   // one increment per noise channel
  double aux = 0.0;         // auxiliary standard normal (SETDM01 only)
};

/// Problem description for du = f dt + sum_m g_m o dW^m.
///
/// When `linear_part` is set the drift splits as f(u) = L u + N(u) with L the
/// diagonal operator and N the `nonlinear` remainder; exponential schemes
/// require this split. `combined_forcing`, when present, evaluates
/// N(u) + sum_m w_m g_m(u) in one pass (spectral problems share the inverse
/// transform between the flux and the noise terms); it must agree with the
/// separate fields to rounding.
///
/// Instances are immutable after construction and safe to share between
/// concurrently integrated trajectories.
struct SdeProblem {
  std::size_t dimension = 0;
  Field drift;
  std::vector<Field> diffusions;
  std::optional<std::vector<Cplx>> linear_part;
  Field nonlinear;
  std::function<StateVector(double, const StateVector&, const std::vector<double>&)>
      combined_forcing;
  bool ito = false;  // poses the problem in Ito calculus (SIFEM/SETDM/CSETDRK1 family)

  std::size_t channels() const { return diffusions.size(); }
};

/// f(t,u) + sum_m g_m(t,u) * dW_m/dt  -- the change of variables that turns a
/// deterministic one-step map into a Stratonovich integrator. The division
/// dW/dt happens once here; all stages of a step must reuse the same values.
StateVector modified_drift(const SdeProblem& problem, double t,
                           const StateVector& u, const Increment& inc);

/// Same map applied to an arbitrary base field (used with the nonlinear
/// remainder by IF/ETD schemes).
StateVector modified_field(const Field& base, const std::vector<Field>& diffusions,
                           double t, const StateVector& u,
                           const std::vector<double>& dw_over_dt);

/// Precompute dW/dt for a step; validates dt > 0 and channel count.
std::vector<double> noise_weights(const SdeProblem& problem, const Increment& inc);

}  // namespace stochetd
