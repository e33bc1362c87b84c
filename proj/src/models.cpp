#include "stochetd/models.hpp"

#include <cmath>
#include <numbers>

namespace stochetd {

SpdeCoefficients kdv_coefficients() { return {.c1 = 1.0, .c3 = 1.0}; }
SpdeCoefficients ks_coefficients() { return {.c1 = 1.0, .c2 = 1.0, .c4 = 1.0}; }
SpdeCoefficients heat_coefficients() { return {.c2 = -1.0}; }
SpdeCoefficients advection_coefficients() { return {.c0 = 1.0}; }
SpdeCoefficients burgers_coefficients() { return {.c1 = 1.0, .c2 = -0.01}; }

SpdeCoefficients model_coefficients(const std::string& name) {
  if (name == "kdv") return kdv_coefficients();
  if (name == "ks") return ks_coefficients();
  if (name == "heat") return heat_coefficients();
  if (name == "advection") return advection_coefficients();
  if (name == "burgers") return burgers_coefficients();
  throw ConfigError("unknown model '" + name + "'");
}

std::vector<std::vector<double>> sample_noise_basis(const NoiseBasisSpec& spec,
                                                    const SpectralGrid1D& grid) {
  const auto& x = grid.x();
  std::vector<std::vector<double>> basis;
  switch (spec.kind) {
    case NoiseBasisSpec::Kind::None:
      break;
    case NoiseBasisSpec::Kind::SineDecay: {
      if (spec.channels < 1) throw ConfigError("sine basis needs channels >= 1");
      for (int m = 1; m <= spec.channels; ++m) {
        std::vector<double> xi(x.size());
        for (std::size_t j = 0; j < x.size(); ++j)
          xi[j] = std::sin(2.0 * std::numbers::pi * x[j] * m) / (100.0 * m);
        basis.push_back(std::move(xi));
      }
      break;
    }
    case NoiseBasisSpec::Kind::SmoothBump: {
      if (spec.channels < 1) throw ConfigError("bump basis needs channels >= 1");
      const double x_min = grid.x0();
      const double w = grid.length() / static_cast<double>(spec.channels + 1);
      for (int j = 1; j <= spec.channels; ++j) {
        const double cj = x_min + j * w;
        std::vector<double> xi(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double r = 2.0 * (x[i] - cj) / w;
          xi[i] = (std::abs(x[i] - cj) < 0.5 * w)
                      ? std::exp(-1.0 / (1.0 - r * r))
                      : 0.0;
        }
        basis.push_back(std::move(xi));
      }
      break;
    }
    case NoiseBasisSpec::Kind::ConstantAdvection: {
      basis.emplace_back(x.size(), spec.amplitude);
      break;
    }
  }
  return basis;
}

std::vector<Cplx> linear_symbol(const SpdeCoefficients& coeffs,
                                const SpectralGrid1D& grid) {
  const auto& k = grid.wavenumbers();
  std::vector<Cplx> lam(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) {
    const double k1 = k[j];
    const double k2 = k1 * k1;
    lam[j] = Cplx(coeffs.c2 * k2 - coeffs.c4 * k2 * k2,
                  -coeffs.c0 * k1 + coeffs.c3 * k1 * k2);
  }
  return lam;
}

namespace {

// out = -i k .* mask .* spectrum_of(field), the flux-form derivative shared by
// the quadratic term and the transport noise. The k=0 entry is exactly zero,
// so both terms conserve the mean.
StateVector flux_derivative(const SpectralGrid1D& grid,
                            const std::vector<double>& field) {
  StateVector hat = grid.to_spectral(field);
  const auto& k = grid.wavenumbers();
  const auto& mask = grid.dealias_mask();
  for (std::size_t j = 0; j < hat.size(); ++j)
    hat[j] = Cplx(0.0, -k[j] * mask[j]) * hat[j];
  return hat;
}

}  // namespace

StateVector nonlinear_flux(const StateVector& u_hat, const SpectralGrid1D& grid,
                           double c1) {
  std::vector<double> u = grid.to_real(u_hat);
  for (double& v : u) v = 0.5 * c1 * v * v;
  StateVector out = flux_derivative(grid, u);
  if (!all_finite(out)) throw NonFiniteError("nonlinear flux is not finite");
  return out;
}

StateVector diffusion_field(const StateVector& u_hat, const SpectralGrid1D& grid,
                            const std::vector<double>& xi) {
  std::vector<double> u = grid.to_real(u_hat);
  for (std::size_t j = 0; j < u.size(); ++j) u[j] *= xi[j];
  StateVector out = flux_derivative(grid, u);
  if (!all_finite(out)) throw NonFiniteError("diffusion field is not finite");
  return out;
}

std::vector<double> travelling_wave_solution(const std::vector<double>& x,
                                             double t, double beta, double a,
                                             double w_t, double length) {
  if (!(beta > 0.0)) throw InvalidConfig("travelling wave needs beta > 0");
  if (!(length > 0.0)) throw InvalidConfig("travelling wave needs a domain length");
  const double half_sqrt_beta = 0.5 * std::sqrt(beta);
  std::vector<double> u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    double arg = x[j] - beta * t - a * w_t;
    arg -= length * std::round(arg / length);  // wrap to [-length/2, length/2)
    const double s = 1.0 / std::cosh(half_sqrt_beta * arg);
    u[j] = 3.0 * beta * s * s;
  }
  return u;
}

SdeProblem build_problem(GridPtr grid, const SpdeCoefficients& coeffs,
                         const NoiseBasisSpec& basis) {
  if (!grid) throw InvalidConfig("build_problem: null grid");
  if (coeffs.c0 == 0.0 && coeffs.c1 == 0.0 && coeffs.c2 == 0.0 &&
      coeffs.c3 == 0.0 && coeffs.c4 == 0.0)
    throw InvalidConfig("all model coefficients are zero");
  auto xi = std::make_shared<const std::vector<std::vector<double>>>(
      sample_noise_basis(basis, *grid));
  auto lam = std::make_shared<const std::vector<Cplx>>(linear_symbol(coeffs, *grid));
  const double c1 = coeffs.c1;

  SdeProblem p;
  p.dimension = grid->n_x();
  p.linear_part = *lam;

  p.nonlinear = [grid, c1](double, const StateVector& u_hat) {
    return nonlinear_flux(u_hat, *grid, c1);
  };

  p.drift = [grid, lam, c1](double, const StateVector& u_hat) {
    StateVector out = nonlinear_flux(u_hat, *grid, c1);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += (*lam)[j] * u_hat[j];
    return out;
  };

  for (std::size_t m = 0; m < xi->size(); ++m) {
    p.diffusions.push_back([grid, xi, m](double, const StateVector& u_hat) {
      return diffusion_field(u_hat, *grid, (*xi)[m]);
    });
  }

  // N(u) + sum_m w_m g_m(u) with a single transform pair: the quadratic flux
  // and all transport products are assembled in real space first.
  p.combined_forcing = [grid, xi, c1](double, const StateVector& u_hat,
                                      const std::vector<double>& w) {
    if (w.size() != xi->size())
      throw DimensionMismatch("combined forcing weight count mismatch");
    std::vector<double> u = grid->to_real(u_hat);
    std::vector<double> h(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) h[j] = 0.5 * c1 * u[j] * u[j];
    for (std::size_t m = 0; m < xi->size(); ++m) {
      const auto& xim = (*xi)[m];
      const double wm = w[m];
      if (wm == 0.0) continue;
      for (std::size_t j = 0; j < u.size(); ++j) h[j] += wm * xim[j] * u[j];
    }
    StateVector out = flux_derivative(*grid, h);
    if (!all_finite(out)) throw NonFiniteError("combined forcing is not finite");
    return out;
  };

  return p;
}

StateVector initial_gaussian(const SpectralGrid1D& grid, double center,
                             double sharpness) {
  const auto& x = grid.x();
  std::vector<double> u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - center;
    u[j] = std::exp(-sharpness * d * d);
  }
  return grid.to_spectral(u);
}

StateVector initial_soliton(const SpectralGrid1D& grid, double beta) {
  return grid.to_spectral(
      travelling_wave_solution(grid.x(), 0.0, beta, 0.0, 0.0, grid.length()));
}

}  // namespace stochetd
