#pragma once

#include <string>
#include <vector>

#include "stochetd/errors.hpp"

namespace stochetd {

/// Explicit Butcher tableau (strictly lower-triangular A). On construction
/// the nodes are recovered from the consistency condition c = A e and the
/// weights are checked to sum to one.
struct ButcherTableau {
  std::vector<std::vector<double>> a;  // s x s, strictly lower-triangular
  std::vector<double> b;               // length s
  std::vector<double> c;               // length s, c = A e

  ButcherTableau(std::vector<std::vector<double>> a_in, std::vector<double> b_in);

  std::size_t stages() const { return b.size(); }
};

/// Named tableaus used by the tests and as deterministic counterparts of the
/// exponential schemes under L = 0.
ButcherTableau tableau_euler();
ButcherTableau tableau_heun();
ButcherTableau tableau_ssp22();
ButcherTableau tableau_ssp33();
ButcherTableau tableau_kutta3();
ButcherTableau tableau_rk4();
ButcherTableau tableau_essprk33();  // underlying scheme of eSSPIFSRK(3,3)

}  // namespace stochetd
