// Command-line driver for the stochetd library. Links only the C API.
//
// Exit codes: 0 success, 2 configuration error, 3 universal blow-up,
// 1 anything else.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "stochetd/stochetd.h"

namespace {

int map_exit(int code) {
  switch (code) {
    case STOCHETD_OK: return 0;
    case STOCHETD_ERR_CONFIG: return 2;
    case STOCHETD_ERR_BLOWUP: return 3;
    default: return 1;
  }
}

int finish(int code, const char* context) {
  if (code != STOCHETD_OK)
    std::fprintf(stderr, "stochetd %s: %s\n", context, stochetd_last_error());
  return map_exit(code);
}

struct ExperimentGuard {
  stochetd_experiment* handle = nullptr;
  ~ExperimentGuard() { stochetd_experiment_free(handle); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochetd: one-step Stratonovich integration toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_csv;
  int repeats = 5, snapshots = 8, threads = 0, nx = 128;
  double dt = 1e-3, length = 10.0;
  std::string scheme = "setdrk4", model = "kdv", format = "csv";

  auto* conv = app.add_subcommand("convergence", "strong-convergence study");
  conv->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  conv->add_option("--out", out_dir, "output directory");
  conv->add_option("--threads", threads, "worker cap");

  auto* eff = app.add_subcommand("efficiency", "convergence with CPU timing");
  eff->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  eff->add_option("--repeats", repeats, "sweep repetitions (default 5)");
  eff->add_option("--out", out_dir, "output directory");
  eff->add_option("--threads", threads, "worker cap");

  auto* sim = app.add_subcommand("simulate", "single trajectory with snapshots");
  sim->add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  sim->add_option("--snapshots", snapshots, "number of snapshots");
  sim->add_option("--format", format, "csv or bin");
  sim->add_option("--out", out_dir, "output directory");

  auto* phi = app.add_subcommand("phi-check", "dump ETD coefficient tables");
  phi->add_option("--scheme", scheme, "setdrk2 | setdrk3 | setdrk4 | ...");
  phi->add_option("--model", model, "kdv | ks | heat | advection | burgers");
  phi->add_option("--nx", nx, "grid points");
  phi->add_option("--length", length, "domain length (sets the k scale)");
  phi->add_option("--dt", dt, "time step");
  phi->add_option("--out", out_csv, "output CSV file")->required();

  auto* classify = app.add_subcommand("classify", "commutativity report (JSON)");
  classify->add_option("--config", config_path, "experiment config (JSON)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) stochetd_set_threads(threads);

  if (phi->parsed()) {
    return finish(stochetd_phi_check(scheme.c_str(), model.c_str(), nx, length,
                                     dt, out_csv.c_str()),
                  "phi-check");
  }

  ExperimentGuard exp;
  int rc = stochetd_experiment_create_from_file(config_path.c_str(), &exp.handle);
  if (rc != STOCHETD_OK) return finish(rc, "config");

  if (conv->parsed())
    return finish(stochetd_run_convergence(exp.handle, out_dir.c_str()),
                  "convergence");
  if (eff->parsed())
    return finish(stochetd_run_efficiency(exp.handle, repeats, out_dir.c_str()),
                  "efficiency");
  if (sim->parsed()) {
    if (format != "csv" && format != "bin") {
      std::fprintf(stderr, "stochetd simulate: format must be csv or bin\n");
      return 2;
    }
    return finish(stochetd_simulate(exp.handle, snapshots, format == "bin",
                                    out_dir.c_str()),
                  "simulate");
  }
  if (classify->parsed()) {
    char buffer[65536];
    rc = stochetd_classify_noise(exp.handle, buffer, sizeof buffer);
    if (rc == STOCHETD_OK) std::printf("%s\n", buffer);
    return finish(rc, "classify");
  }
  return 1;
}
