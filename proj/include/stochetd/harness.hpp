#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stochetd/calculus.hpp"
#include "stochetd/models.hpp"
#include "stochetd/schemes.hpp"

namespace stochetd {

struct GridSpec {
  std::size_t nx = 256;
  double length = 1.0;
  double x0 = 0.0;
};

struct InitialSpec {
  enum class Kind { Soliton, Gaussian };
  Kind kind = Kind::Gaussian;
  double beta = 64.0;       // soliton amplitude parameter
  double center = 0.5;      // gaussian centre
  double sharpness = 50.0;  // gaussian exp(-sharpness (x-center)^2)
};

struct ModelSpec {
  SpdeCoefficients coefficients;
  GridSpec grid;
  NoiseBasisSpec noise;
  InitialSpec initial;
};

struct ReferenceSpec {
  enum class Kind { Analytic, FineNumerical };
  Kind kind = Kind::FineNumerical;
  SchemeId scheme = SchemeId::Setdrk4;
  int refinement = 8;  // power of two, strictly finer than the finest level
};

enum class ErrorMetric { FinalL2, SpacetimeL2 };

/// One strong-convergence experiment: a model, a scheme list, a dyadic dt
/// ladder dt_i = dt_base / 2^i, and the error protocol. Parsed from / echoed
/// to JSON by the CLI.
struct ExperimentConfig {
  ModelSpec model;
  std::vector<SchemeId> schemes;
  double dt_base = 1e-3;
  int dt_levels = 4;
  double t_max = 0.1;
  int ensemble_size = 16;
  std::uint64_t seed = 0;
  ReferenceSpec reference;
  ErrorMetric metric = ErrorMetric::FinalL2;
  bool esspifsrk22_printed_form = false;
  ContourConfig contour;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;

  double dt_at(int level) const;
  void validate() const;
};

struct ConvergenceRecord {
  SchemeId scheme;
  double dt = 0.0;
  double rms_error = 0.0;  // sqrt(mean over successful paths of ||u - ref||^2)
  double rel_error = 0.0;  // rms_error normalised by the reference RMS
  int n_success = 0;
  int n_blowup = 0;
  double cpu_seconds = 0.0;  // populated by run_efficiency only
};

struct SlopeFit {
  SchemeId scheme;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> levels_used;
};

/// Coupled-path strong convergence: per ensemble member one fine Brownian
/// path is generated and coarsened to every dt level, so all levels (and the
/// fine numerical reference, when configured) see the same path. Errors are
/// relative L2 against the reference at t_max (or spacetime L2 for the
/// analytic travelling wave). Members run on a worker pool capped by
/// STOCHETD_THREADS; aggregation is order-independent, so identical
/// (config, seed) produce identical records.
std::vector<ConvergenceRecord> run_strong_convergence(const ExperimentConfig& cfg);

/// Ordinary least squares of log2(rel_error) against log2(dt). window > 0
/// restricts the fit to the finest `window` usable levels; cells with more
/// blow-ups than successes are excluded. Needs at least 3 levels.
SlopeFit fit_order(const std::vector<ConvergenceRecord>& records, SchemeId scheme,
                   int window = 0);

/// Convergence sweep with wall-clock timing: each (scheme, dt) sweep is
/// integrated `repeats` times and the mean time recorded. Path generation and
/// coefficient precomputation stay outside the timed region; the precompute
/// cost is returned separately and reported through emit_report.
std::vector<ConvergenceRecord> run_efficiency(const ExperimentConfig& cfg,
                                              int repeats = 5,
                                              double* precompute_seconds = nullptr);

/// Writes records.csv (17 significant digits) and report.json (config echo,
/// fits, seed, decision flags) under out_dir.
void emit_report(const ExperimentConfig& cfg,
                 const std::vector<ConvergenceRecord>& records,
                 const std::vector<SlopeFit>& fits, const std::string& out_dir,
                 double precompute_seconds = 0.0);

/// Parses a records.csv produced by emit_report.
std::vector<ConvergenceRecord> parse_records_csv(const std::string& path);

struct SimulateResult {
  int snapshots_written = 0;
  bool blew_up = false;
};

/// Integrates one trajectory (path_index 0) of the first configured scheme at
/// dt_base and writes equispaced snapshots: CSV "x,u" slices or binary SNAP
/// frames (magic "SNAP", u64 n_x, f64 t, n_x f64 samples).
SimulateResult simulate(const ExperimentConfig& cfg, int snapshots,
                        const std::string& out_dir, bool binary_format = false);

/// Dumps every coefficient array of an exponential scheme for a model's
/// linear symbol as CSV (k, eigenvalue_re, eigenvalue_im, coeff_name,
/// value_re, value_im).
void phi_check_csv(SchemeId scheme, const std::string& model, std::size_t nx,
                   double length, double dt, const std::string& out_csv,
                   const ContourConfig& contour = {});

/// Commutativity classification of the configured model probed at the
/// initial condition plus two seeded smooth perturbations.
CommutativityReport classify_noise(const ExperimentConfig& cfg);

/// Worker cap from STOCHETD_THREADS (defaults to the hardware concurrency).
int worker_count();

/// True when every (scheme, dt) cell lost all ensemble members to blow-up.
bool universal_blowup(const std::vector<ConvergenceRecord>& records);

}  // namespace stochetd
