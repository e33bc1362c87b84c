#include "stochetd/tableau.hpp"

#include <cmath>

namespace stochetd {

ButcherTableau::ButcherTableau(std::vector<std::vector<double>> a_in,
                               std::vector<double> b_in)
    : a(std::move(a_in)), b(std::move(b_in)) {
  const std::size_t s = b.size();
  if (a.size() != s) throw InvalidConfig("tableau: A and b sizes disagree");
  double bsum = 0.0;
  for (double w : b) bsum += w;
  if (std::abs(bsum - 1.0) > 1e-12)
    throw InvalidConfig("tableau: weights must sum to 1");
  c.assign(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    if (a[i].size() != s) throw InvalidConfig("tableau: A must be s x s");
    for (std::size_t j = 0; j < s; ++j) {
      if (j >= i && a[i][j] != 0.0)
        throw InvalidConfig("tableau: A must be strictly lower-triangular");
      c[i] += a[i][j];
    }
  }
}

ButcherTableau tableau_euler() { return ButcherTableau({{0.0}}, {1.0}); }

ButcherTableau tableau_heun() {
  return ButcherTableau({{0.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5});
}

ButcherTableau tableau_ssp22() { return tableau_heun(); }

ButcherTableau tableau_ssp33() {
  return ButcherTableau(
      {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.25, 0.25, 0.0}},
      {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0});
}

ButcherTableau tableau_kutta3() {
  return ButcherTableau(
      {{0.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, {-1.0, 2.0, 0.0}},
      {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0});
}

ButcherTableau tableau_rk4() {
  return ButcherTableau({{0.0, 0.0, 0.0, 0.0},
                         {0.5, 0.0, 0.0, 0.0},
                         {0.0, 0.5, 0.0, 0.0},
                         {0.0, 0.0, 1.0, 0.0}},
                        {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0});
}

ButcherTableau tableau_essprk33() {
  return ButcherTableau(
      {{0.0, 0.0, 0.0},
       {2.0 / 3.0, 0.0, 0.0},
       {2.0 / 9.0, 4.0 / 9.0, 0.0}},
      {0.25, 3.0 / 16.0, 9.0 / 16.0});
}

}  // namespace stochetd
