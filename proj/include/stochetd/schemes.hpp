#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stochetd/brownian.hpp"
#include "stochetd/phi_functions.hpp"
#include "stochetd/problem.hpp"
#include "stochetd/tableau.hpp"

namespace stochetd {

enum class SchemeId {
  Ssp22,
  Ssp33,
  Srk4,
  SifrkGeneric,
  Ifsrk4,
  Esspifsrk22,
  Esspifsrk33,
  Setdrk2,
  Setdrk3,
  Setdrk4,
  // Ito-calculus family; only applicable to problems flagged as Ito.
  Sifem,
  Setdm10,
  Setdm01,
  Csetdrk1,
};

std::string scheme_name(SchemeId id);
SchemeId scheme_from_name(const std::string& name);
std::vector<SchemeId> all_scheme_ids();

bool scheme_is_ito(SchemeId id);
bool scheme_is_exponential(SchemeId id);  // needs problem.linear_part
int deterministic_order(SchemeId id);

/// (P_d, P_dc, P_c, P_s): deterministic, drift-commutative, commutative and
/// general strong mean-square orders of a scheme.
struct OrderProfile {
  double p_d = 0.0;
  double p_dc = 0.0;
  double p_c = 0.0;
  double p_s = 0.0;
};
OrderProfile order_profile(SchemeId id);

/// Options resolved at stepper construction time.
struct StepperOptions {
  ContourConfig contour;
  /// eSSPIFSRK(2,2) as printed applies e^{L dt} to the whole second-stage
  /// group, which is inconsistent for the pure linear problem; the default
  /// uses the source arrangement that reduces to SSP22 at L = 0. The printed
  /// form stays available for comparison.
  bool esspifsrk22_printed_form = false;
  std::optional<ButcherTableau> sifrk_tableau;  // for SchemeId::SifrkGeneric
  std::uint64_t aux_seed = 0;                   // SETDM01 auxiliary normals
};

/// One-step map with precomputed coefficient/propagator tables. step() is
/// deterministic in (step_index, t, u, inc); instances carry scratch buffers,
/// so use one instance per worker thread.
class OneStepMethod {
 public:
  virtual ~OneStepMethod() = default;
  virtual SchemeId id() const = 0;
  virtual StateVector step(std::size_t step_index, double t, const StateVector& u,
                           const Increment& inc) = 0;
};

std::unique_ptr<OneStepMethod> make_stepper(const SdeProblem& problem, SchemeId id,
                                            double dt,
                                            const StepperOptions& opts = {});

// ---------------------------------------------------------------------------
// Pure one-step maps (spec surface). The stepper objects above precompute
// exactly these maps' coefficient tables.

/// Explicit stochastic Runge-Kutta step: s stage evaluations of the modified
/// drift f + sum_m g_m dW^m/dt over the tableau.
StateVector step_srk(const SdeProblem& problem, const ButcherTableau& tableau,
                     double t, const StateVector& u, const Increment& inc);

/// Integrating-factor RK step for a named scheme (Ifsrk4, Esspifsrk22,
/// Esspifsrk33); requires problem.linear_part.
StateVector step_sifrk(const SdeProblem& problem, SchemeId scheme, double t,
                       const StateVector& u, const Increment& inc,
                       bool esspifsrk22_printed_form = false);

/// Generic SIFRK over an explicit tableau.
StateVector step_sifrk(const SdeProblem& problem, const ButcherTableau& tableau,
                       double t, const StateVector& u, const Increment& inc);

/// SETDRK2/3/4 step using a precomputed coefficient set (checked against the
/// increment's dt and the problem's linear operator).
StateVector step_setdrk(const SdeProblem& problem, const EtdCoefficientSet& coeffs,
                        double t, const StateVector& u, const Increment& inc);

/// One Ito step (SIFEM, SETDM10, SETDM01, CSETDRK1); z is the auxiliary
/// standard normal consumed by SETDM01's Ito-isometry variance term.
StateVector step_ito(const SdeProblem& problem, SchemeId scheme, double t,
                     const StateVector& u, const Increment& inc, double z = 0.0);

// ---------------------------------------------------------------------------

struct Trajectory {
  StateVector final_state;
  bool blew_up = false;
  std::size_t blowup_step = 0;
  double final_time = 0.0;
};

/// Observer called after every step (and once for the initial state with
/// step_index 0); used by the harness to accumulate spacetime errors without
/// storing snapshots.
using StepObserver = std::function<void(std::size_t step_index, double t,
                                        const StateVector& u)>;

/// Iterate the one-step map over n_steps increments taken from `paths`
/// (already coarsened so paths.dt_fine equals the integration step). A
/// non-finite state stops the trajectory and is reported as a blow-up rather
/// than thrown.
Trajectory integrate_path(const SdeProblem& problem, OneStepMethod& stepper,
                          const StateVector& u0, double t0,
                          const BrownianPaths& paths, std::size_t n_steps,
                          const StepObserver& observer = nullptr);

}  // namespace stochetd
