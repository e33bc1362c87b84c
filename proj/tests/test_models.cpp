#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "stochetd/models.hpp"
#include "stochetd/schemes.hpp"

using namespace stochetd;

namespace {

StateVector random_smooth_state(const SpectralGrid1D& grid, unsigned seed,
                                int max_mode = 6) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  StateVector u(grid.n_x(), Cplx(0.0, 0.0));
  u[0] = Cplx(unif(rng), 0.0);
  for (int m = 1; m <= max_mode; ++m) {
    const Cplx c(unif(rng), unif(rng));
    u[m] = c / static_cast<double>(m);
    u[grid.n_x() - m] = std::conj(u[m]);
  }
  return u;
}

double conjugate_symmetry_defect(const StateVector& u) {
  const std::size_t n = u.size();
  double d = std::abs(u[0].imag());
  for (std::size_t i = 1; i < n; ++i)
    d = std::max(d, std::abs(u[i] - std::conj(u[(n - i) % n])));
  return d;
}

}  // namespace

TEST_CASE("grid: transforms round-trip real fields") {
  auto grid = make_grid(128, 2.0 * std::numbers::pi, 0.0);
  std::vector<double> u(grid->n_x());
  for (std::size_t j = 0; j < u.size(); ++j)
    u[j] = std::exp(std::sin(grid->x()[j])) - 0.3 * std::cos(3.0 * grid->x()[j]);
  auto hat = grid->to_spectral(u);
  auto back = grid->to_real(hat);
  for (std::size_t j = 0; j < u.size(); ++j)
    CHECK(back[j] == doctest::Approx(u[j]).epsilon(1e-13));
  double mean = 0.0;
  for (double v : u) mean += v / static_cast<double>(u.size());
  CHECK(hat[0].real() == doctest::Approx(mean).epsilon(1e-13));  // mode 0 is the mean
  CHECK_THROWS_AS((void)make_grid(100, 1.0), InvalidConfig);  // not a power of two
}

TEST_CASE("linear symbol signs") {
  auto grid = make_grid(64, 1.0, 0.0);
  SUBCASE("heat: real and non-positive") {
    auto lam = linear_symbol(heat_coefficients(), *grid);
    for (const auto& z : lam) {
      CHECK(z.imag() == 0.0);
      CHECK(z.real() <= 0.0);
    }
  }
  SUBCASE("KdV: purely imaginary") {
    auto lam = linear_symbol(kdv_coefficients(), *grid);
    for (const auto& z : lam) CHECK(z.real() == 0.0);
  }
  SUBCASE("mode zero vanishes for every coefficient set") {
    for (auto c : {kdv_coefficients(), ks_coefficients(), heat_coefficients(),
                   advection_coefficients(), burgers_coefficients()}) {
      auto lam = linear_symbol(c, *grid);
      CHECK(lam[0] == Cplx(0.0, 0.0));
    }
  }
  SUBCASE("KS: growth below k = 1, damping above") {
    // resolves the k^2 vs k^4 sign bookkeeping by behaviour
    auto grid4pi = make_grid(64, 4.0 * std::numbers::pi, 0.0);
    auto lam = linear_symbol(ks_coefficients(), *grid4pi);
    CHECK(lam[1].real() > 0.0);   // k = 1/2: 1/4 - 1/16 > 0
    CHECK(lam[4].real() < 0.0);   // k = 2: 4 - 16 < 0
    CHECK(lam[10].real() < -500.0);  // k = 5: 25 - 625
  }
}

TEST_CASE("nonlinear flux") {
  auto grid = make_grid(64, 2.0 * std::numbers::pi, 0.0);
  SUBCASE("constant field gives zero") {
    StateVector u(grid->n_x(), Cplx(0.0, 0.0));
    u[0] = Cplx(2.5, 0.0);
    auto n = nonlinear_flux(u, *grid, 1.0);
    for (const auto& z : n) CHECK(std::abs(z) == 0.0);
  }
  SUBCASE("cosine field matches the analytic derivative") {
    // u = cos x: -c1 (u^2/2)_x = c1 sin(2x)/2
    std::vector<double> u(grid->n_x());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::cos(grid->x()[j]);
    auto n = nonlinear_flux(grid->to_spectral(u), *grid, 1.3);
    std::vector<double> expected(grid->n_x());
    for (std::size_t j = 0; j < u.size(); ++j)
      expected[j] = 1.3 * std::sin(2.0 * grid->x()[j]) / 2.0;
    auto e_hat = grid->to_spectral(expected);
    for (std::size_t j = 0; j < n.size(); ++j)
      CHECK(std::abs(n[j] - e_hat[j]) < 1e-10);
  }
  SUBCASE("modes above the cutoff are exactly zero") {
    auto u = random_smooth_state(*grid, 11, 20);
    auto n = nonlinear_flux(u, *grid, 1.0);
    const auto& mask = grid->dealias_mask();
    for (std::size_t j = 0; j < n.size(); ++j)
      if (mask[j] == 0.0) CHECK(std::abs(n[j]) == 0.0);
  }
  SUBCASE("mean mode of the flux is exactly zero") {
    auto u = random_smooth_state(*grid, 12);
    CHECK(std::abs(nonlinear_flux(u, *grid, 1.0)[0]) == 0.0);
  }
  SUBCASE("reality is preserved") {
    auto u = random_smooth_state(*grid, 13);
    CHECK(conjugate_symmetry_defect(nonlinear_flux(u, *grid, 1.0)) < 1e-12);
  }
}

TEST_CASE("diffusion field") {
  auto grid = make_grid(64, 1.0, 0.0);
  SUBCASE("constant profile is spectral advection") {
    auto u = random_smooth_state(*grid, 21);
    std::vector<double> xi(grid->n_x(), 0.7);
    auto g = diffusion_field(u, *grid, xi);
    const auto& k = grid->wavenumbers();
    const auto& mask = grid->dealias_mask();
    for (std::size_t j = 0; j < g.size(); ++j) {
      const Cplx expected = Cplx(0.0, -0.7 * k[j] * mask[j]) * u[j];
      CHECK(std::abs(g[j] - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
  SUBCASE("zero state maps to zero") {
    StateVector u(grid->n_x(), Cplx(0.0, 0.0));
    std::vector<double> xi(grid->n_x(), 1.0);
    auto g = diffusion_field(u, *grid, xi);
    for (const auto& z : g) CHECK(std::abs(z) == 0.0);
  }
  SUBCASE("sine profile on a cosine field matches the product rule") {
    // g(u) = -(xi u)_x with xi = sin(2 pi x), u = cos(2 pi x):
    // xi u = sin(4 pi x)/2, g = -2 pi cos(4 pi x)
    std::vector<double> u(grid->n_x()), expected(grid->n_x());
    const double tp = 2.0 * std::numbers::pi;
    for (std::size_t j = 0; j < u.size(); ++j) {
      u[j] = std::cos(tp * grid->x()[j]);
      expected[j] = -tp * std::cos(2.0 * tp * grid->x()[j]);
    }
    std::vector<double> xi(grid->n_x());
    for (std::size_t j = 0; j < xi.size(); ++j)
      xi[j] = std::sin(tp * grid->x()[j]);
    auto g = diffusion_field(grid->to_spectral(u), *grid, xi);
    auto e_hat = grid->to_spectral(expected);
    for (std::size_t j = 0; j < g.size(); ++j)
      CHECK(std::abs(g[j] - e_hat[j]) < 1e-10);
  }
  SUBCASE("mean mode is exactly zero") {
    auto u = random_smooth_state(*grid, 22);
    std::vector<double> xi(grid->n_x());
    for (std::size_t j = 0; j < xi.size(); ++j)
      xi[j] = std::sin(2.0 * std::numbers::pi * grid->x()[j]);
    CHECK(std::abs(diffusion_field(u, *grid, xi)[0]) == 0.0);
  }
}

TEST_CASE("dealias mask is idempotent") {
  auto grid = make_grid(64, 1.0, 0.0);
  auto u = random_smooth_state(*grid, 31, 30);
  StateVector once = u;
  grid->apply_dealias(once);
  StateVector twice = once;
  grid->apply_dealias(twice);
  CHECK(once == twice);
}

TEST_CASE("noise bases") {
  auto grid = make_grid(128, 1.0, 0.0);
  SUBCASE("sine decay profile") {
    auto basis = sample_noise_basis(
        {NoiseBasisSpec::Kind::SineDecay, 3, 1.0}, *grid);
    REQUIRE(basis.size() == 3);
    for (int m = 1; m <= 3; ++m)
      for (std::size_t j = 0; j < grid->n_x(); ++j)
        CHECK(basis[m - 1][j] ==
              doctest::Approx(std::sin(2.0 * std::numbers::pi * grid->x()[j] * m) /
                              (100.0 * m)).epsilon(1e-14));
  }
  SUBCASE("smooth bumps have disjoint supports") {
    auto basis = sample_noise_basis(
        {NoiseBasisSpec::Kind::SmoothBump, 3, 1.0}, *grid);
    REQUIRE(basis.size() == 3);
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b)
        for (std::size_t j = 0; j < grid->n_x(); ++j)
          CHECK(basis[a][j] * basis[b][j] == 0.0);
    // peak value of the mollifier is e^{-1}
    double peak = 0.0;
    for (double v : basis[1]) peak = std::max(peak, v);
    CHECK(peak == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
  }
  SUBCASE("constant advection is a single flat channel") {
    auto basis = sample_noise_basis(
        {NoiseBasisSpec::Kind::ConstantAdvection, 0, 2.5}, *grid);
    REQUIRE(basis.size() == 1);
    for (double v : basis[0]) CHECK(v == 2.5);
  }
}

TEST_CASE("travelling wave solution") {
  auto grid = make_grid(256, 10.0, -5.0);
  const double beta = 64.0;
  SUBCASE("t = 0, W = 0 is the soliton initial condition") {
    auto u = travelling_wave_solution(grid->x(), 0.0, beta, 1.0, 0.0, 10.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double s = 1.0 / std::cosh(0.5 * std::sqrt(beta) * grid->x()[j]);
      CHECK(u[j] == doctest::Approx(3.0 * beta * s * s).epsilon(1e-14));
    }
  }
  SUBCASE("a = 0 translates at speed beta") {
    const double t = 0.03;
    auto moved = travelling_wave_solution(grid->x(), t, beta, 0.0, 123.0, 10.0);
    std::vector<double> shifted(grid->x());
    for (double& x : shifted) x -= beta * t;
    auto expected = travelling_wave_solution(shifted, 0.0, beta, 0.0, 0.0, 10.0);
    for (std::size_t j = 0; j < moved.size(); ++j)
      CHECK(moved[j] == doctest::Approx(expected[j]).epsilon(1e-12));
  }
  SUBCASE("peak value is 3 beta regardless of (t, W)") {
    std::vector<double> probe{0.4 - 0.25};  // x = beta t + a W for the values below
    auto u = travelling_wave_solution(probe, 0.00625, beta, 0.5, -0.5, 10.0);
    CHECK(u[0] == doctest::Approx(3.0 * beta).epsilon(1e-13));
  }
}

TEST_CASE("build_problem rejects an all-zero operator") {
  auto grid = make_grid(32, 1.0, 0.0);
  CHECK_THROWS_AS((void)build_problem(grid, SpdeCoefficients{},
                                      {NoiseBasisSpec::Kind::None, 0, 1.0}),
                  InvalidConfig);
}

TEST_CASE("build_problem wiring") {
  auto grid = make_grid(128, 1.0, 0.0);
  auto problem = build_problem(grid, kdv_coefficients(),
                               {NoiseBasisSpec::Kind::SineDecay, 3, 1.0});
  auto u = random_smooth_state(*grid, 41);
  REQUIRE(problem.channels() == 3);
  REQUIRE(problem.linear_part.has_value());

  SUBCASE("split consistency: drift = L u + N(u)") {
    auto full = problem.drift(0.0, u);
    auto n = problem.nonlinear(0.0, u);
    const auto& lam = *problem.linear_part;
    double defect = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      defect += std::norm(full[j] - (lam[j] * u[j] + n[j]));
      scale += std::norm(full[j]);
    }
    CHECK(std::sqrt(defect) <= 1e-12 * std::sqrt(scale));
  }
  SUBCASE("fused forcing equals N + sum w_m g_m") {
    const std::vector<double> w{0.8, -1.7, 0.3};
    auto fused = problem.combined_forcing(0.0, u, w);
    auto expected = problem.nonlinear(0.0, u);
    for (std::size_t m = 0; m < 3; ++m)
      axpy(Cplx(w[m], 0.0), problem.diffusions[m](0.0, u), expected);
    double defect = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      defect += std::norm(fused[j] - expected[j]);
      scale += std::norm(expected[j]);
    }
    CHECK(std::sqrt(defect) <= 1e-12 * std::sqrt(scale));
  }
  SUBCASE("reality preserved through every field") {
    CHECK(conjugate_symmetry_defect(problem.drift(0.0, u)) < 1e-10);
    for (const auto& g : problem.diffusions)
      CHECK(conjugate_symmetry_defect(g(0.0, u)) < 1e-10);
  }
}

TEST_CASE("deterministic KdV soliton converges at 4th order under SETDRK4") {
  auto grid = make_grid(256, 10.0, -5.0);
  auto problem = build_problem(grid, kdv_coefficients(), {});
  const double beta = 64.0, t_max = 0.01;
  StateVector u0 = initial_soliton(*grid, beta);

  auto error_at = [&](double dt) {
    const auto n = static_cast<std::size_t>(std::llround(t_max / dt));
    auto paths = generate_paths(0, 0, 0, n, dt);
    auto stepper = make_stepper(problem, SchemeId::Setdrk4, dt);
    auto traj = integrate_path(problem, *stepper, u0, 0.0, paths, n);
    REQUIRE(!traj.blew_up);
    auto u = grid->to_real(traj.final_state);
    auto ref = travelling_wave_solution(grid->x(), t_max, beta, 0.0, 0.0,
                                        grid->length());
    double d2 = 0.0, r2 = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      d2 += (u[j] - ref[j]) * (u[j] - ref[j]);
      r2 += ref[j] * ref[j];
    }
    return std::sqrt(d2 / r2);
  };
  const double e1 = error_at(8e-5);
  const double e2 = error_at(4e-5);
  CHECK(e1 / e2 > 10.0);  // ~2^4 with some slack
  CHECK(e1 / e2 < 26.0);
}
