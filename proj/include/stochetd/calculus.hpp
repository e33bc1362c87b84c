#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stochetd/problem.hpp"

namespace stochetd {

/// Autonomous vector field used for bracket probing.
using ProbeField = std::function<StateVector(const StateVector&)>;

/// Lie bracket [F,G](u) = DG(u)[F(u)] - DF(u)[G(u)] via central
/// finite-difference directional derivatives,
///   D Phi(u)[v] ~ (Phi(u + eps v^) - Phi(u - eps v^)) ||v|| / (2 eps),
/// with v^ = v/||v||. Directions with ||v|| < 1e-14 are treated as degenerate
/// and contribute zero.
StateVector lie_bracket(const ProbeField& f, const ProbeField& g,
                        const StateVector& u, double eps);

struct CommutativityReport {
  enum class Class { NonCommutative, Commutative, DriftCommutative };
  std::vector<double> drift_brackets;               // max_u ||[f, g_i]||
  std::vector<std::vector<double>> noise_brackets;  // max_u ||[g_i, g_j]||
  std::vector<double> drift_scales;                 // ||f|| ||g_i|| / ||u|| scale
  std::vector<std::vector<double>> noise_scales;
  double tolerance = 0.0;
  Class classification = Class::NonCommutative;

  std::string class_name() const;
  std::string to_json() const;
};

/// Classifies a problem's noise by probing the drift and pairwise noise
/// brackets at the given states: any noise bracket above tolerance means
/// NonCommutative; otherwise vanishing drift brackets upgrade Commutative to
/// DriftCommutative. Bracket norms are compared against the product of the
/// field norms over the state norm, the natural scale of the bracket.
CommutativityReport commutativity_report(const SdeProblem& problem,
                                         const std::vector<StateVector>& probes,
                                         double eps_rel = 1e-5,
                                         double tol = 1e-3);

}  // namespace stochetd
