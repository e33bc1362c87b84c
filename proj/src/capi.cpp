#include "stochetd/stochetd.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "stochetd/harness.hpp"

using namespace stochetd;

struct stochetd_experiment {
  ExperimentConfig config;
  std::string config_echo;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(STOCHETD_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(STOCHETD_ERR_RUNTIME, "unknown error");
  }
}

std::vector<SlopeFit> fit_all(const ExperimentConfig& cfg,
                              const std::vector<ConvergenceRecord>& records) {
  std::vector<SlopeFit> fits;
  for (SchemeId s : cfg.schemes) {
    try {
      fits.push_back(fit_order(records, s));
    } catch (const InsufficientData&) {
      // scheme lost too many cells to blow-up; no fit for it
    }
  }
  return fits;
}

}  // namespace

extern "C" {

const char* stochetd_version(void) { return "0.1.0"; }

const char* stochetd_last_error(void) { return g_last_error.c_str(); }

int stochetd_set_threads(int n) {
  if (n < 1) return fail(STOCHETD_ERR_INVALID_ARG, "thread count must be >= 1");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d", n);
  setenv("STOCHETD_THREADS", buf, 1);
  return STOCHETD_OK;
}

int stochetd_experiment_create(const char* config_json, stochetd_experiment** out) {
  if (!config_json || !out)
    return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto* exp = new stochetd_experiment{
        ExperimentConfig::from_json_text(config_json), {}};
    *out = exp;
    return STOCHETD_OK;
  });
}

int stochetd_experiment_create_from_file(const char* path,
                                         stochetd_experiment** out) {
  if (!path || !out) return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() {
    auto* exp =
        new stochetd_experiment{ExperimentConfig::from_json_file(path), {}};
    *out = exp;
    return STOCHETD_OK;
  });
}

void stochetd_experiment_free(stochetd_experiment* exp) { delete exp; }

int stochetd_experiment_config_json(stochetd_experiment* exp,
                                    const char** out_json) {
  if (!exp || !out_json) return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  return guarded([&]() {
    exp->config_echo = exp->config.to_json_text();
    *out_json = exp->config_echo.c_str();
    return STOCHETD_OK;
  });
}

int stochetd_run_convergence(stochetd_experiment* exp, const char* out_dir) {
  if (!exp || !out_dir) return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  return guarded([&]() {
    const std::vector<ConvergenceRecord> records =
        run_strong_convergence(exp->config);
    emit_report(exp->config, records, fit_all(exp->config, records), out_dir);
    if (universal_blowup(records))
      return fail(STOCHETD_ERR_BLOWUP, "every (scheme, dt) cell blew up");
    return STOCHETD_OK;
  });
}

int stochetd_run_efficiency(stochetd_experiment* exp, int repeats,
                            const char* out_dir) {
  if (!exp || !out_dir) return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  return guarded([&]() {
    double precompute = 0.0;
    const std::vector<ConvergenceRecord> records =
        run_efficiency(exp->config, repeats, &precompute);
    emit_report(exp->config, records, fit_all(exp->config, records), out_dir,
                precompute);
    if (universal_blowup(records))
      return fail(STOCHETD_ERR_BLOWUP, "every (scheme, dt) cell blew up");
    return STOCHETD_OK;
  });
}

int stochetd_simulate(stochetd_experiment* exp, int snapshots, int binary_format,
                      const char* out_dir) {
  if (!exp || !out_dir) return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  return guarded([&]() {
    const SimulateResult result =
        simulate(exp->config, snapshots, out_dir, binary_format != 0);
    if (result.blew_up)
      return fail(STOCHETD_ERR_BLOWUP, "trajectory blew up");
    return STOCHETD_OK;
  });
}

int stochetd_classify_noise(stochetd_experiment* exp, char* buffer,
                            size_t buffer_size) {
  if (!exp || !buffer || buffer_size == 0)
    return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  return guarded([&]() {
    const std::string report = classify_noise(exp->config).to_json();
    std::snprintf(buffer, buffer_size, "%s", report.c_str());
    return STOCHETD_OK;
  });
}

int stochetd_phi_check(const char* scheme, const char* model, int nx,
                       double length, double dt, const char* out_csv) {
  if (!scheme || !model || !out_csv)
    return fail(STOCHETD_ERR_INVALID_ARG, "null argument");
  return guarded([&]() {
    phi_check_csv(scheme_from_name(scheme), model,
                  static_cast<std::size_t>(nx), length, dt, out_csv);
    return STOCHETD_OK;
  });
}

}  // extern "C"
