#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stochetd/errors.hpp"

namespace stochetd {

/// M-channel Brownian increments on a uniform fine grid. Regenerating with
/// the same (seed, path_index, channels, n_steps, dt_fine) reproduces the
/// matrix bit-exactly; distinct path_index values give independent streams,
/// so ensemble members can be generated without coordination.
struct BrownianPaths {
  std::size_t channels = 0;
  std::size_t n_steps = 0;
  double dt_fine = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::vector<double> increments;  // channels x n_steps, row-major

  double at(std::size_t channel, std::size_t step) const {
    return increments[channel * n_steps + step];
  }
  /// W_m(T) by telescoping the increments.
  double total(std::size_t channel) const;
  double horizon() const { return dt_fine * static_cast<double>(n_steps); }
};

BrownianPaths generate_paths(std::uint64_t seed, std::uint64_t path_index,
                             std::size_t channels, std::size_t n_steps,
                             double dt_fine);

/// Sum blocks of `factor` consecutive fine increments (left to right), so the
/// coarse path is the same Brownian sample seen at resolution factor*dt_fine.
BrownianPaths coarsen_paths(const BrownianPaths& paths, std::size_t factor);

/// Multi-index over {0,1,...,M}; 0 denotes integration against time.
struct NestedIndex {
  std::vector<int> indices;
};

/// Fine-grid quadrature for the nested Stratonovich integral J_idx over
/// [0, n_steps*dt_fine]. Each nesting level integrates the running inner
/// integral with midpoint evaluation (X_k + X_{k+1})/2 against the next
/// increment, which converges to the Stratonovich value as dt_fine -> 0.
/// Depth is capped at 4 (the shuffle-identity checks insert one index into
/// a depth-3 word).
double nested_stratonovich_oracle(const BrownianPaths& paths, const NestedIndex& idx);

/// Antisymmetric part (J_ij - J_ji)/2 of the double integral; channels are
/// 1-based. Zero when i == j, antisymmetric under swap by construction.
double levy_area(const BrownianPaths& paths, int i, int j);

/// Binary dump (little endian): magic "BPTH", u64 channels, u64 n_steps,
/// f64 dt_fine, u64 seed, u64 path_index, then channels*n_steps f64 increments.
void write_paths(const BrownianPaths& paths, const std::string& filename);
BrownianPaths read_paths(const std::string& filename);

/// Standard normal keyed by (key, counter); deterministic and stateless, used
/// for the auxiliary variate of SETDM01.
double counter_gaussian(std::uint64_t key, std::uint64_t counter);

}  // namespace stochetd
