#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace stochetd {

using Cplx = std::complex<double>;

/// State of one trajectory: complex spectral coefficients for SPDE problems,
/// or real scalars (zero imaginary part) for small SDE/ODE test problems.
using StateVector = std::vector<Cplx>;

inline bool is_finite(const Cplx& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline bool all_finite(const StateVector& u) {
  for (const auto& z : u)
    if (!is_finite(z)) return false;
  return true;
}

inline double norm_l2(const StateVector& u) {
  double s = 0.0;
  for (const auto& z : u) s += std::norm(z);
  return std::sqrt(s);
}

inline double dist_l2(const StateVector& a, const StateVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

/// y += alpha * x
inline void axpy(const Cplx& alpha, const StateVector& x, StateVector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline StateVector scaled(double alpha, const StateVector& x) {
  StateVector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
  return y;
}

}  // namespace stochetd
