#include "stochetd/brownian.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>

namespace stochetd {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t path_index) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ (path_index + 0x9E3779B97F4A7C15ULL);
  std::uint64_t b = splitmix64(s);
  return b;
}

double to_unit_interval(std::uint64_t x) {
  // (0,1]: 53-bit mantissa, shifted away from zero so log() is safe.
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

// Trig-form Box-Muller on a splitmix64 stream; both outputs of a pair are used.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t key) : state_(key) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = to_unit_interval(splitmix64(state_));
    const double u2 = to_unit_interval(splitmix64(state_));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

double BrownianPaths::total(std::size_t channel) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) s += at(channel, i);
  return s;
}

BrownianPaths generate_paths(std::uint64_t seed, std::uint64_t path_index,
                             std::size_t channels, std::size_t n_steps,
                             double dt_fine) {
  if (n_steps == 0) throw InvalidConfig("n_steps must be >= 1");
  if (!(dt_fine > 0.0)) throw InvalidConfig("dt_fine must be positive");

  BrownianPaths p;
  p.channels = channels;
  p.n_steps = n_steps;
  p.dt_fine = dt_fine;
  p.seed = seed;
  p.path_index = path_index;
  p.increments.resize(channels * n_steps);

  const double scale = std::sqrt(dt_fine);
  GaussianStream gauss(stream_key(seed, path_index));
  for (double& x : p.increments) x = scale * gauss.next();
  return p;
}

BrownianPaths coarsen_paths(const BrownianPaths& paths, std::size_t factor) {
  if (factor == 0 || paths.n_steps % factor != 0)
    throw InvalidFactor("coarsening factor must divide n_steps");
  if (factor == 1) return paths;

  BrownianPaths c;
  c.channels = paths.channels;
  c.n_steps = paths.n_steps / factor;
  c.dt_fine = paths.dt_fine * static_cast<double>(factor);
  c.seed = paths.seed;
  c.path_index = paths.path_index;
  c.increments.resize(c.channels * c.n_steps);

  for (std::size_t m = 0; m < c.channels; ++m) {
    for (std::size_t i = 0; i < c.n_steps; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < factor; ++j) s += paths.at(m, i * factor + j);
      c.increments[m * c.n_steps + i] = s;
    }
  }
  return c;
}

double nested_stratonovich_oracle(const BrownianPaths& paths, const NestedIndex& idx) {
  if (idx.indices.empty()) throw InvalidConfig("empty nested index");
  if (idx.indices.size() > 4) throw InvalidConfig("nesting depth capped at 4");
  for (int j : idx.indices)
    if (j < 0 || static_cast<std::size_t>(j) > paths.channels)
      throw IndexOutOfRange("nested index entry exceeds channel count");

  const std::size_t n = paths.n_steps;
  // cum[k] holds the running value of the current nesting level at grid time k.
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) cum[k] = 1.0;  // integrand of level 1

  std::vector<double> next(n + 1, 0.0);
  for (int j : idx.indices) {
    next[0] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dx = (j == 0) ? paths.dt_fine : paths.at(static_cast<std::size_t>(j - 1), k);
      next[k + 1] = next[k] + 0.5 * (cum[k] + cum[k + 1]) * dx;
    }
    cum = next;
  }
  return cum[n];
}

double levy_area(const BrownianPaths& paths, int i, int j) {
  if (i < 1 || j < 1 || static_cast<std::size_t>(i) > paths.channels ||
      static_cast<std::size_t>(j) > paths.channels)
    throw IndexOutOfRange("levy_area channel out of range");
  if (i == j) return 0.0;
  const double jij = nested_stratonovich_oracle(paths, {{i, j}});
  const double jji = nested_stratonovich_oracle(paths, {{j, i}});
  return 0.5 * (jij - jji);
}

namespace {
constexpr char kMagic[4] = {'B', 'P', 'T', 'H'};

void put_u64(std::FILE* f, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  std::fwrite(b, 1, 8, f);
}

std::uint64_t get_u64(std::FILE* f) {
  unsigned char b[8];
  if (std::fread(b, 1, 8, f) != 8) throw IoError("truncated paths file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::FILE* f, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  put_u64(f, v);
}

double get_f64(std::FILE* f) {
  std::uint64_t v = get_u64(f);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}
}  // namespace

void write_paths(const BrownianPaths& paths, const std::string& filename) {
  std::FILE* f = std::fopen(filename.c_str(), "wb");
  if (!f) throw IoError("cannot open " + filename + " for writing");
  std::fwrite(kMagic, 1, 4, f);
  put_u64(f, paths.channels);
  put_u64(f, paths.n_steps);
  put_f64(f, paths.dt_fine);
  put_u64(f, paths.seed);
  put_u64(f, paths.path_index);
  for (double x : paths.increments) put_f64(f, x);
  std::fclose(f);
}

BrownianPaths read_paths(const std::string& filename) {
  std::FILE* f = std::fopen(filename.c_str(), "rb");
  if (!f) throw IoError("cannot open " + filename);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    std::fclose(f);
    throw IoError(filename + " is not a BPTH paths file");
  }
  BrownianPaths p;
  try {
    p.channels = get_u64(f);
    p.n_steps = get_u64(f);
    p.dt_fine = get_f64(f);
    p.seed = get_u64(f);
    p.path_index = get_u64(f);
    p.increments.resize(p.channels * p.n_steps);
    for (double& x : p.increments) x = get_f64(f);
  } catch (...) {
    std::fclose(f);
    throw;
  }
  std::fclose(f);
  return p;
}

double counter_gaussian(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t s = key ^ (counter * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL);
  const double u1 = to_unit_interval(splitmix64(s));
  const double u2 = to_unit_interval(splitmix64(s));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace stochetd
