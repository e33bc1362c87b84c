#pragma once

#include <memory>
#include <vector>

#include "stochetd/errors.hpp"
#include "stochetd/state.hpp"

namespace stochetd {

/// Periodic 1D grid on [x0, x0 + length) with FFT-ordered wavenumbers scaled
/// by 2*pi/length, the 2/3 dealias mask, and a reentrant transform provider.
/// Immutable after construction; shared read-only across trajectories.
class SpectralGrid1D {
 public:
  SpectralGrid1D(std::size_t n_x, double length, double x0 = 0.0);
  ~SpectralGrid1D();
  SpectralGrid1D(const SpectralGrid1D&) = delete;
  SpectralGrid1D& operator=(const SpectralGrid1D&) = delete;

  std::size_t n_x() const { return n_x_; }
  double length() const { return length_; }
  double x0() const { return x0_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& wavenumbers() const { return k_; }
  const std::vector<double>& dealias_mask() const { return mask_; }

  /// Spectral coefficients of a real field; normalised so mode 0 is the mean.
  StateVector to_spectral(const std::vector<double>& u_real) const;
  /// Real field from spectral coefficients (imaginary residues dropped).
  std::vector<double> to_real(const StateVector& u_hat) const;

  /// Zero every mode above the 2/3 cutoff (idempotent).
  void apply_dealias(StateVector& u_hat) const;

  /// Unnormalised complex DFTs; thread-safe.
  void fft(StateVector& data) const;
  void ifft(StateVector& data) const;

 private:
  std::size_t n_x_;
  double length_;
  double x0_;
  std::vector<double> x_;
  std::vector<double> k_;
  std::vector<double> mask_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

using GridPtr = std::shared_ptr<const SpectralGrid1D>;

GridPtr make_grid(std::size_t n_x, double length, double x0 = 0.0);

}  // namespace stochetd
