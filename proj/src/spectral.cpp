#include "stochetd/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace stochetd {

namespace {
// FFTW planning is not thread-safe; execution via fftw_execute_dft is.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

struct SpectralGrid1D::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

SpectralGrid1D::SpectralGrid1D(std::size_t n_x, double length, double x0)
    : n_x_(n_x), length_(length), x0_(x0), plans_(std::make_unique<Plans>()) {
  if (!is_power_of_two(n_x)) throw InvalidConfig("n_x must be a power of two");
  if (!(length > 0.0)) throw InvalidConfig("domain length must be positive");

  const double dx = length / static_cast<double>(n_x);
  x_.resize(n_x);
  for (std::size_t j = 0; j < n_x; ++j) x_[j] = x0 + dx * static_cast<double>(j);

  // FFT mode ordering: 0, 1, ..., n/2-1, -n/2, ..., -1, scaled by 2*pi/length.
  const double k_scale = 2.0 * std::numbers::pi / length;
  k_.resize(n_x);
  for (std::size_t j = 0; j < n_x; ++j) {
    const long long m = (j < n_x / 2) ? static_cast<long long>(j)
                                      : static_cast<long long>(j) -
                                            static_cast<long long>(n_x);
    k_[j] = k_scale * static_cast<double>(m);
  }

  // 2/3 rule: keep |m| <= n/3.
  const long long cutoff = static_cast<long long>(n_x) / 3;
  mask_.resize(n_x);
  for (std::size_t j = 0; j < n_x; ++j) {
    const long long m = (j < n_x / 2) ? static_cast<long long>(j)
                                      : static_cast<long long>(j) -
                                            static_cast<long long>(n_x);
    mask_[j] = (std::llabs(m) <= cutoff) ? 1.0 : 0.0;
  }

  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<Cplx> scratch(n_x);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  plans_->forward = fftw_plan_dft_1d(static_cast<int>(n_x), ptr, ptr,
                                     FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_dft_1d(static_cast<int>(n_x), ptr, ptr,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward)
    throw Error(ErrorCode::runtime, "fftw plan creation failed");
}

SpectralGrid1D::~SpectralGrid1D() = default;

void SpectralGrid1D::fft(StateVector& data) const {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, ptr, ptr);
}

void SpectralGrid1D::ifft(StateVector& data) const {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, ptr, ptr);
}

StateVector SpectralGrid1D::to_spectral(const std::vector<double>& u_real) const {
  if (u_real.size() != n_x_) throw DimensionMismatch("field size != n_x");
  StateVector hat(n_x_);
  for (std::size_t j = 0; j < n_x_; ++j) hat[j] = Cplx(u_real[j], 0.0);
  fft(hat);
  const double inv_n = 1.0 / static_cast<double>(n_x_);
  for (auto& z : hat) z *= inv_n;
  return hat;
}

std::vector<double> SpectralGrid1D::to_real(const StateVector& u_hat) const {
  if (u_hat.size() != n_x_) throw DimensionMismatch("spectrum size != n_x");
  StateVector tmp = u_hat;
  ifft(tmp);
  std::vector<double> u(n_x_);
  for (std::size_t j = 0; j < n_x_; ++j) u[j] = tmp[j].real();
  return u;
}

void SpectralGrid1D::apply_dealias(StateVector& u_hat) const {
  for (std::size_t j = 0; j < n_x_; ++j) u_hat[j] *= mask_[j];
}

GridPtr make_grid(std::size_t n_x, double length, double x0) {
  return std::make_shared<const SpectralGrid1D>(n_x, length, x0);
}

}  // namespace stochetd
