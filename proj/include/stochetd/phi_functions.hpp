#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stochetd/errors.hpp"
#include "stochetd/state.hpp"

namespace stochetd {

enum class SchemeId;  // schemes.hpp

/// Trapezoidal contour quadrature on a circle centred at each scaled
/// eigenvalue z = dt*lambda. The quadrature error of the periodic trapezoid
/// rule decays exponentially in n_points.
struct ContourConfig {
  int n_points = 64;
  double radius = 1.0;
};

/// Rational-exponential coefficient function
///   f(z) = (sum_t e^{scale_t z} * poly_t(z)) / z^denom_power,
/// with a removable singularity at z = 0. This covers every SETDRK/Ito
/// coefficient (e.g. (e^z - 1)/z, (-4 - z + e^z(4 - 3z + z^2))/z^3).
struct PhiTerm {
  double exp_scale = 0.0;
  std::vector<double> poly;  // poly[j] multiplies z^j
};

struct PhiFunction {
  std::vector<PhiTerm> terms;
  int denom_power = 0;
};

/// Closed-form evaluation; suffers catastrophic cancellation for small |z|.
Cplx phi_direct(const PhiFunction& f, Cplx z);

/// f(dt*lambda) per eigenvalue as the average of f over n_points contour
/// nodes z_k = dt*lambda + radius*e^{2 pi i k / n}.
std::vector<Cplx> contour_phi_eval(const PhiFunction& f,
                                   std::span<const Cplx> eigenvalues, double dt,
                                   const ContourConfig& cfg = {});

/// Named coefficient arrays for one exponential scheme, precomputed per
/// eigenvalue before time stepping begins. Propagators (plain exponentials)
/// are evaluated directly; every function with a removable singularity goes
/// through the contour quadrature. Immutable once built, shared read-only by
/// all trajectories.
struct EtdCoefficientSet {
  SchemeId scheme_id;
  double dt = 0.0;
  std::uint64_t operator_hash = 0;
  std::size_t dimension = 0;
  std::map<std::string, std::vector<Cplx>, std::less<>> arrays;

  const std::vector<Cplx>& at(const std::string& name) const;
};

EtdCoefficientSet etd_coefficient_set(SchemeId scheme,
                                      std::span<const Cplx> eigenvalues, double dt,
                                      const ContourConfig& cfg = {});

/// Process-wide cache keyed by (scheme, dt, operator hash); coefficient sets
/// are computed once and reused across trajectories and repeats.
std::shared_ptr<const EtdCoefficientSet> cached_etd_coefficient_set(
    SchemeId scheme, std::span<const Cplx> eigenvalues, double dt,
    const ContourConfig& cfg = {});

std::uint64_t operator_hash(std::span<const Cplx> eigenvalues);

/// Registry of the coefficient functions used by the schemes, keyed by the
/// names they carry in EtdCoefficientSet ("A1", "B3", "E2", ...).
const PhiFunction& named_phi(const std::string& name);

}  // namespace stochetd
