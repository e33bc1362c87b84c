#pragma once

#include <string>
#include <vector>

#include "stochetd/problem.hpp"
#include "stochetd/spectral.hpp"

namespace stochetd {

/// Coefficients of the prototypical 1D SPDE
///   d_t u + (c1/2 (u^2)_x + c0 u_x + c2 u_xx + c3 u_xxx + c4 u_xxxx) dt
///        + sum_m (xi_m u)_x o dW^m = 0.
/// Subcases: heat (c2 = -1), advection (c0), Burgers (c1, c2 < 0),
/// KdV (c1, c3), KS (c1, c2, c4).
struct SpdeCoefficients {
  double c0 = 0.0;  // advection
  double c1 = 0.0;  // quadratic flux
  double c2 = 0.0;  // second derivative (c2 = -nu gives diffusion nu u_xx)
  double c3 = 0.0;  // dispersion
  double c4 = 0.0;  // fourth derivative
};

SpdeCoefficients kdv_coefficients();
SpdeCoefficients ks_coefficients();
SpdeCoefficients heat_coefficients();
SpdeCoefficients advection_coefficients();
SpdeCoefficients burgers_coefficients();
SpdeCoefficients model_coefficients(const std::string& name);

/// Basis of transport-noise profiles xi_m(x).
struct NoiseBasisSpec {
  enum class Kind { None, SineDecay, SmoothBump, ConstantAdvection };
  Kind kind = Kind::None;
  int channels = 0;        // SineDecay / SmoothBump
  double amplitude = 1.0;  // ConstantAdvection
};

/// Sampled basis functions on the grid, one vector per channel.
std::vector<std::vector<double>> sample_noise_basis(const NoiseBasisSpec& spec,
                                                    const SpectralGrid1D& grid);

/// Diagonal linear symbol L(k) = -c0 ik + c2 k^2 + c3 ik^3 - c4 k^4 so that
/// d û/dt = L û for the linear terms.
std::vector<Cplx> linear_symbol(const SpdeCoefficients& coeffs,
                                const SpectralGrid1D& grid);

/// Pseudo-spectral quadratic flux N(u) = -(ik c1/2) (u^2)^, 2/3-dealiased.
StateVector nonlinear_flux(const StateVector& u_hat, const SpectralGrid1D& grid,
                           double c1);

/// Transport-noise field g_m(u) = -ik (xi_m u)^, 2/3-dealiased.
StateVector diffusion_field(const StateVector& u_hat, const SpectralGrid1D& grid,
                            const std::vector<double>& xi);

/// Pathwise travelling-wave solution u(x,t) = 3 beta sech^2(sqrt(beta)/2 *
/// (x - beta t - a W_t)) of the stochastic KdV equation under constant
/// advection noise, periodically wrapped onto [x0, x0 + length).
std::vector<double> travelling_wave_solution(const std::vector<double>& x,
                                             double t, double beta, double a,
                                             double w_t, double length);

/// Assembles the finite-dimensional spectral SDE: linear part from
/// linear_symbol, nonlinear remainder from nonlinear_flux, one diffusion
/// field per basis channel, plus the fused forcing evaluator.
SdeProblem build_problem(GridPtr grid, const SpdeCoefficients& coeffs,
                         const NoiseBasisSpec& basis);

/// Initial conditions used by the experiments.
StateVector initial_gaussian(const SpectralGrid1D& grid, double center = 0.5,
                             double sharpness = 50.0);
StateVector initial_soliton(const SpectralGrid1D& grid, double beta);

}  // namespace stochetd
