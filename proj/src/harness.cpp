#include "stochetd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace stochetd {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config JSON

namespace {

SpdeCoefficients coefficients_from_json(const json& j) {
  if (j.is_string()) return model_coefficients(j.get<std::string>());
  SpdeCoefficients c;
  c.c0 = j.value("c0", 0.0);
  c.c1 = j.value("c1", 0.0);
  c.c2 = j.value("c2", 0.0);
  c.c3 = j.value("c3", 0.0);
  c.c4 = j.value("c4", 0.0);
  return c;
}

NoiseBasisSpec noise_from_json(const json& j) {
  NoiseBasisSpec n;
  const std::string kind = j.value("kind", "none");
  if (kind == "none") {
    n.kind = NoiseBasisSpec::Kind::None;
  } else if (kind == "sine_decay") {
    n.kind = NoiseBasisSpec::Kind::SineDecay;
    n.channels = j.value("channels", 3);
  } else if (kind == "smooth_bump") {
    n.kind = NoiseBasisSpec::Kind::SmoothBump;
    n.channels = j.value("channels", 3);
  } else if (kind == "constant_advection") {
    n.kind = NoiseBasisSpec::Kind::ConstantAdvection;
    n.amplitude = j.value("amplitude", 1.0);
  } else {
    throw ConfigError("unknown noise kind '" + kind + "'");
  }
  return n;
}

InitialSpec initial_from_json(const json& j) {
  InitialSpec s;
  const std::string kind = j.value("kind", "gaussian");
  if (kind == "soliton") {
    s.kind = InitialSpec::Kind::Soliton;
    s.beta = j.value("beta", 64.0);
  } else if (kind == "gaussian") {
    s.kind = InitialSpec::Kind::Gaussian;
    s.center = j.value("center", 0.5);
    s.sharpness = j.value("sharpness", 50.0);
  } else {
    throw ConfigError("unknown initial condition '" + kind + "'");
  }
  return s;
}

json coefficients_to_json(const SpdeCoefficients& c) {
  return json{{"c0", c.c0}, {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}};
}

json noise_to_json(const NoiseBasisSpec& n) {
  switch (n.kind) {
    case NoiseBasisSpec::Kind::None: return json{{"kind", "none"}};
    case NoiseBasisSpec::Kind::SineDecay:
      return json{{"kind", "sine_decay"}, {"channels", n.channels}};
    case NoiseBasisSpec::Kind::SmoothBump:
      return json{{"kind", "smooth_bump"}, {"channels", n.channels}};
    case NoiseBasisSpec::Kind::ConstantAdvection:
      return json{{"kind", "constant_advection"}, {"amplitude", n.amplitude}};
  }
  return {};
}

json initial_to_json(const InitialSpec& s) {
  if (s.kind == InitialSpec::Kind::Soliton)
    return json{{"kind", "soliton"}, {"beta", s.beta}};
  return json{{"kind", "gaussian"}, {"center", s.center}, {"sharpness", s.sharpness}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    const json& jm = j.at("model");
    cfg.model.coefficients = coefficients_from_json(jm.at("coefficients"));
    const json& jg = jm.at("grid");
    cfg.model.grid.nx = jg.at("nx").get<std::size_t>();
    cfg.model.grid.length = jg.at("length").get<double>();
    cfg.model.grid.x0 = jg.value("x0", 0.0);
    cfg.model.noise = noise_from_json(jm.value("noise", json{{"kind", "none"}}));
    cfg.model.initial = initial_from_json(jm.value("initial", json{{"kind", "gaussian"}}));

    for (const auto& s : j.at("schemes"))
      cfg.schemes.push_back(scheme_from_name(s.get<std::string>()));
    cfg.dt_base = j.at("dt_base").get<double>();
    cfg.dt_levels = j.at("dt_levels").get<int>();
    cfg.t_max = j.at("t_max").get<double>();
    cfg.ensemble_size = j.value("ensemble_size", 16);
    cfg.seed = j.value("seed", std::uint64_t{0});

    if (j.contains("reference")) {
      const json& jr = j.at("reference");
      const std::string kind = jr.value("kind", "fine_numerical");
      if (kind == "analytic") {
        cfg.reference.kind = ReferenceSpec::Kind::Analytic;
      } else if (kind == "fine_numerical") {
        cfg.reference.kind = ReferenceSpec::Kind::FineNumerical;
        cfg.reference.scheme = scheme_from_name(jr.value("scheme", std::string("setdrk4")));
        cfg.reference.refinement = jr.value("refinement", 8);
      } else {
        throw ConfigError("unknown reference kind '" + kind + "'");
      }
    }
    const std::string metric = j.value("error_metric", "final_l2");
    if (metric == "final_l2") cfg.metric = ErrorMetric::FinalL2;
    else if (metric == "spacetime_l2") cfg.metric = ErrorMetric::SpacetimeL2;
    else throw ConfigError("unknown error_metric '" + metric + "'");

    cfg.esspifsrk22_printed_form = j.value("esspifsrk22_printed_form", false);
    if (j.contains("contour")) {
      cfg.contour.n_points = j["contour"].value("n_points", 64);
      cfg.contour.radius = j["contour"].value("radius", 1.0);
    }
    cfg.validate();
    return cfg;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["model"] = {{"coefficients", coefficients_to_json(model.coefficients)},
                {"grid", {{"nx", model.grid.nx},
                          {"length", model.grid.length},
                          {"x0", model.grid.x0}}},
                {"noise", noise_to_json(model.noise)},
                {"initial", initial_to_json(model.initial)}};
  json js = json::array();
  for (SchemeId s : schemes) js.push_back(scheme_name(s));
  j["schemes"] = js;
  j["dt_base"] = dt_base;
  j["dt_levels"] = dt_levels;
  j["t_max"] = t_max;
  j["ensemble_size"] = ensemble_size;
  j["seed"] = seed;
  if (reference.kind == ReferenceSpec::Kind::Analytic) {
    j["reference"] = {{"kind", "analytic"}};
  } else {
    j["reference"] = {{"kind", "fine_numerical"},
                      {"scheme", scheme_name(reference.scheme)},
                      {"refinement", reference.refinement}};
  }
  j["error_metric"] = metric == ErrorMetric::FinalL2 ? "final_l2" : "spacetime_l2";
  j["esspifsrk22_printed_form"] = esspifsrk22_printed_form;
  j["contour"] = {{"n_points", contour.n_points}, {"radius", contour.radius}};
  return j.dump(2);
}

double ExperimentConfig::dt_at(int level) const {
  return dt_base / std::pow(2.0, level);
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

bool divides_to_tolerance(double t_max, double dt, long long* n_out) {
  const double raw = t_max / dt;
  const long long n = std::llround(raw);
  if (n < 1) return false;
  if (std::abs(static_cast<double>(n) * dt - t_max) > 1e-9 * t_max) return false;
  if (n_out) *n_out = n;
  return true;
}

bool analytic_compatible(const ModelSpec& m) {
  return m.noise.kind == NoiseBasisSpec::Kind::ConstantAdvection &&
         m.initial.kind == InitialSpec::Kind::Soliton &&
         m.coefficients.c1 == 1.0 && m.coefficients.c3 == 1.0 &&
         m.coefficients.c0 == 0.0 && m.coefficients.c2 == 0.0 &&
         m.coefficients.c4 == 0.0;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schemes.empty()) throw ConfigError("no schemes configured");
  if (!(dt_base > 0.0)) throw ConfigError("dt_base must be positive");
  if (dt_levels < 1) throw ConfigError("dt_levels must be >= 1");
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (ensemble_size < 1) throw ConfigError("ensemble_size must be >= 1");
  for (int i = 0; i < dt_levels; ++i)
    if (!divides_to_tolerance(t_max, dt_at(i), nullptr))
      throw ConfigError("t_max is not an integer multiple of dt level " +
                        std::to_string(i));

  const bool ito = scheme_is_ito(schemes.front());
  for (SchemeId s : schemes)
    if (scheme_is_ito(s) != ito)
      throw ConfigError("schemes mix Ito and Stratonovich calculi");

  if (reference.kind == ReferenceSpec::Kind::FineNumerical) {
    if (reference.refinement < 2 || !is_power_of_two(reference.refinement))
      throw ConfigError("reference refinement must be a power of two >= 2");
    if (scheme_is_ito(reference.scheme) != ito)
      throw ConfigError("reference scheme calculus mismatch");
  } else {
    if (ito) throw ConfigError("analytic travelling-wave reference is Stratonovich");
    if (!analytic_compatible(model))
      throw ConfigError(
          "analytic reference needs the KdV model (c1=c3=1, others 0), "
          "constant-advection noise and a soliton initial condition");
  }
  if (metric == ErrorMetric::SpacetimeL2 &&
      reference.kind != ReferenceSpec::Kind::Analytic)
    throw ConfigError("spacetime_l2 metric requires the analytic reference");
}

// ---------------------------------------------------------------------------
// Strong-convergence driver

namespace {

struct CellOutcome {
  double diff2 = 0.0;  // ||u - ref||^2 (final) or sum over steps (spacetime)
  double ref2 = 0.0;
  bool blew_up = false;
};

struct RunPlan {
  GridPtr grid;
  SdeProblem problem;
  StateVector u0;
  std::vector<double> dts;
  std::vector<std::size_t> steps;
  std::vector<std::size_t> factors;  // coarsening factor per level
  double dt_fine = 0.0;
  std::size_t n_fine = 0;
  bool analytic = false;
  double advection_a = 0.0;
  double beta = 0.0;
};

RunPlan make_plan(const ExperimentConfig& cfg) {
  cfg.validate();
  RunPlan plan;
  plan.grid = make_grid(cfg.model.grid.nx, cfg.model.grid.length, cfg.model.grid.x0);
  plan.problem = build_problem(plan.grid, cfg.model.coefficients, cfg.model.noise);
  plan.problem.ito = scheme_is_ito(cfg.schemes.front());

  plan.u0 = cfg.model.initial.kind == InitialSpec::Kind::Soliton
                ? initial_soliton(*plan.grid, cfg.model.initial.beta)
                : initial_gaussian(*plan.grid, cfg.model.initial.center,
                                   cfg.model.initial.sharpness);
  // The solver state lives in the dealiased subspace; modes above the cutoff
  // never receive nonlinear input and only destabilise explicit schemes.
  plan.grid->apply_dealias(plan.u0);

  plan.analytic = cfg.reference.kind == ReferenceSpec::Kind::Analytic;
  plan.advection_a = cfg.model.noise.amplitude;
  plan.beta = cfg.model.initial.beta;

  const int refinement = plan.analytic ? 1 : cfg.reference.refinement;
  plan.dt_fine = cfg.dt_at(cfg.dt_levels - 1) / refinement;
  long long n_fine = 0;
  if (!divides_to_tolerance(cfg.t_max, plan.dt_fine, &n_fine))
    throw ConfigError("t_max is not an integer multiple of the fine step");
  plan.n_fine = static_cast<std::size_t>(n_fine);

  for (int i = 0; i < cfg.dt_levels; ++i) {
    plan.dts.push_back(cfg.dt_at(i));
    long long n = 0;
    divides_to_tolerance(cfg.t_max, plan.dts.back(), &n);
    plan.steps.push_back(static_cast<std::size_t>(n));
    plan.factors.push_back(static_cast<std::size_t>(1)
                           << (cfg.dt_levels - 1 - i) * 1u);
    plan.factors.back() *= static_cast<std::size_t>(refinement);
  }
  return plan;
}

StepperOptions stepper_options(const ExperimentConfig& cfg, std::uint64_t member) {
  StepperOptions opts;
  opts.contour = cfg.contour;
  opts.esspifsrk22_printed_form = cfg.esspifsrk22_printed_form;
  opts.aux_seed = cfg.seed ^ (0xA5A5A5A5ULL + member * 0x100000001B3ULL);
  return opts;
}

// Final-time comparison in physical space.
CellOutcome final_outcome(const SpectralGrid1D& grid, const Trajectory& traj,
                          const std::vector<double>& ref_real) {
  CellOutcome out;
  if (traj.blew_up) {
    out.blew_up = true;
    return out;
  }
  const std::vector<double> u = grid.to_real(traj.final_state);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double d = u[j] - ref_real[j];
    out.diff2 += d * d;
    out.ref2 += ref_real[j] * ref_real[j];
  }
  return out;
}

CellOutcome spacetime_outcome(const SdeProblem& problem, const SpectralGrid1D& grid,
                              OneStepMethod& stepper, const StateVector& u0,
                              const BrownianPaths& coarse, std::size_t n_steps,
                              double beta, double a) {
  CellOutcome out;
  double w_run = 0.0;
  StepObserver observer = [&](std::size_t k, double t, const StateVector& u) {
    if (k > 0) w_run += coarse.at(0, k - 1);
    const std::vector<double> ref =
        travelling_wave_solution(grid.x(), t, beta, a, w_run, grid.length());
    const std::vector<double> ur = grid.to_real(u);
    for (std::size_t j = 0; j < ur.size(); ++j) {
      const double d = ur[j] - ref[j];
      out.diff2 += d * d;
      out.ref2 += ref[j] * ref[j];
    }
  };
  Trajectory traj = integrate_path(problem, stepper, u0, 0.0, coarse, n_steps, observer);
  if (traj.blew_up) return {.diff2 = 0.0, .ref2 = 0.0, .blew_up = true};
  // Scale by dt so the value is the time-integrated squared error.
  out.diff2 *= coarse.dt_fine;
  out.ref2 *= coarse.dt_fine;
  return out;
}

// One ensemble member across every (level, scheme) cell.
void process_member(const ExperimentConfig& cfg, const RunPlan& plan,
                    std::uint64_t member, std::vector<CellOutcome>& slots) {
  const std::size_t channels = plan.problem.channels();
  const BrownianPaths fine =
      generate_paths(cfg.seed, member, channels, plan.n_fine, plan.dt_fine);
  const std::size_t n_schemes = cfg.schemes.size();

  std::vector<double> ref_real;
  bool ref_failed = false;
  if (plan.analytic) {
    if (cfg.metric == ErrorMetric::FinalL2) {
      const double w_t = channels ? fine.total(0) : 0.0;
      ref_real = travelling_wave_solution(plan.grid->x(), cfg.t_max, plan.beta,
                                          plan.advection_a, w_t,
                                          plan.grid->length());
    }
  } else {
    auto ref_stepper = make_stepper(plan.problem, cfg.reference.scheme,
                                    plan.dt_fine, stepper_options(cfg, member));
    Trajectory ref_traj =
        integrate_path(plan.problem, *ref_stepper, plan.u0, 0.0, fine, plan.n_fine);
    if (ref_traj.blew_up) {
      ref_failed = true;
    } else {
      ref_real = plan.grid->to_real(ref_traj.final_state);
    }
  }

  for (std::size_t level = 0; level < plan.dts.size(); ++level) {
    const BrownianPaths coarse = coarsen_paths(fine, plan.factors[level]);
    for (std::size_t s = 0; s < n_schemes; ++s) {
      CellOutcome& slot = slots[level * n_schemes + s];
      if (ref_failed) {
        slot.blew_up = true;
        continue;
      }
      auto stepper = make_stepper(plan.problem, cfg.schemes[s], plan.dts[level],
                                  stepper_options(cfg, member));
      if (cfg.metric == ErrorMetric::SpacetimeL2) {
        slot = spacetime_outcome(plan.problem, *plan.grid, *stepper, plan.u0,
                                 coarse, plan.steps[level], plan.beta,
                                 plan.advection_a);
      } else {
        Trajectory traj = integrate_path(plan.problem, *stepper, plan.u0, 0.0,
                                         coarse, plan.steps[level]);
        slot = final_outcome(*plan.grid, traj, ref_real);
      }
    }
  }
}

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 4) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

double pairwise_sum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size());
}

std::vector<ConvergenceRecord> reduce_records(
    const ExperimentConfig& cfg, const RunPlan& plan,
    const std::vector<std::vector<CellOutcome>>& member_slots) {
  const std::size_t n_schemes = cfg.schemes.size();
  std::vector<ConvergenceRecord> records;
  for (std::size_t level = 0; level < plan.dts.size(); ++level) {
    for (std::size_t s = 0; s < n_schemes; ++s) {
      ConvergenceRecord rec;
      rec.scheme = cfg.schemes[s];
      rec.dt = plan.dts[level];
      std::vector<double> diff2, ref2;
      for (const auto& slots : member_slots) {
        const CellOutcome& cell = slots[level * n_schemes + s];
        if (cell.blew_up) {
          ++rec.n_blowup;
        } else {
          ++rec.n_success;
          diff2.push_back(cell.diff2);
          ref2.push_back(cell.ref2);
        }
      }
      if (rec.n_success > 0) {
        const double sd = pairwise_sum(diff2);
        const double sr = pairwise_sum(ref2);
        rec.rms_error = std::sqrt(sd / rec.n_success);
        rec.rel_error = sr > 0.0 ? std::sqrt(sd / sr)
                                 : std::numeric_limits<double>::quiet_NaN();
      } else {
        rec.rms_error = std::numeric_limits<double>::quiet_NaN();
        rec.rel_error = std::numeric_limits<double>::quiet_NaN();
      }
      records.push_back(rec);
    }
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const ConvergenceRecord& a, const ConvergenceRecord& b) {
                     const std::string an = scheme_name(a.scheme);
                     const std::string bn = scheme_name(b.scheme);
                     if (an != bn) return an < bn;
                     return a.dt > b.dt;
                   });
  return records;
}

}  // namespace

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("STOCHETD_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

std::vector<ConvergenceRecord> run_strong_convergence(const ExperimentConfig& cfg) {
  const RunPlan plan = make_plan(cfg);
  const std::size_t cells = plan.dts.size() * cfg.schemes.size();
  std::vector<std::vector<CellOutcome>> member_slots(
      cfg.ensemble_size, std::vector<CellOutcome>(cells));

  const int workers =
      std::min(worker_count(), std::max(1, cfg.ensemble_size));
  if (workers <= 1) {
    for (int m = 0; m < cfg.ensemble_size; ++m)
      process_member(cfg, plan, static_cast<std::uint64_t>(m), member_slots[m]);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (int m = w; m < cfg.ensemble_size; m += workers)
            process_member(cfg, plan, static_cast<std::uint64_t>(m),
                           member_slots[m]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return reduce_records(cfg, plan, member_slots);
}

std::vector<ConvergenceRecord> run_efficiency(const ExperimentConfig& cfg,
                                              int repeats,
                                              double* precompute_seconds) {
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  const RunPlan plan = make_plan(cfg);
  const std::size_t n_schemes = cfg.schemes.size();
  const std::size_t cells = plan.dts.size() * n_schemes;
  std::vector<std::vector<CellOutcome>> member_slots(
      cfg.ensemble_size, std::vector<CellOutcome>(cells));
  std::vector<double> mean_seconds(cells, 0.0);

  using clock = std::chrono::steady_clock;

  // Coefficient tables are built once, outside the timed stepping loops, and
  // their cost reported separately.
  double precompute = 0.0;
  {
    const auto t0 = clock::now();
    for (std::size_t level = 0; level < plan.dts.size(); ++level)
      for (std::size_t s = 0; s < n_schemes; ++s)
        (void)make_stepper(plan.problem, cfg.schemes[s], plan.dts[level],
                           stepper_options(cfg, 0));
    precompute = std::chrono::duration<double>(clock::now() - t0).count();
  }
  if (precompute_seconds) *precompute_seconds = precompute;

  for (int rep = 0; rep < repeats; ++rep) {
    std::vector<double> sweep_seconds(cells, 0.0);
    for (int m = 0; m < cfg.ensemble_size; ++m) {
      const BrownianPaths fine = generate_paths(cfg.seed, m, plan.problem.channels(),
                                                plan.n_fine, plan.dt_fine);
      std::vector<double> ref_real;
      bool ref_failed = false;
      if (plan.analytic) {
        const double w_t = plan.problem.channels() ? fine.total(0) : 0.0;
        ref_real = travelling_wave_solution(plan.grid->x(), cfg.t_max, plan.beta,
                                            plan.advection_a, w_t,
                                            plan.grid->length());
      } else {
        auto ref_stepper = make_stepper(plan.problem, cfg.reference.scheme,
                                        plan.dt_fine, stepper_options(cfg, m));
        Trajectory ref_traj = integrate_path(plan.problem, *ref_stepper, plan.u0,
                                             0.0, fine, plan.n_fine);
        if (ref_traj.blew_up) ref_failed = true;
        else ref_real = plan.grid->to_real(ref_traj.final_state);
      }
      for (std::size_t level = 0; level < plan.dts.size(); ++level) {
        const BrownianPaths coarse = coarsen_paths(fine, plan.factors[level]);
        for (std::size_t s = 0; s < n_schemes; ++s) {
          CellOutcome& slot = member_slots[m][level * n_schemes + s];
          if (ref_failed) {
            slot.blew_up = true;
            continue;
          }
          auto stepper = make_stepper(plan.problem, cfg.schemes[s],
                                      plan.dts[level], stepper_options(cfg, m));
          const auto t0 = clock::now();
          Trajectory traj = integrate_path(plan.problem, *stepper, plan.u0, 0.0,
                                           coarse, plan.steps[level]);
          sweep_seconds[level * n_schemes + s] +=
              std::chrono::duration<double>(clock::now() - t0).count();
          slot = final_outcome(*plan.grid, traj, ref_real);
        }
      }
    }
    for (std::size_t c = 0; c < cells; ++c)
      mean_seconds[c] += sweep_seconds[c] / repeats;
  }

  std::vector<ConvergenceRecord> records = reduce_records(cfg, plan, member_slots);
  for (auto& rec : records) {
    for (std::size_t level = 0; level < plan.dts.size(); ++level) {
      if (plan.dts[level] != rec.dt) continue;
      for (std::size_t s = 0; s < n_schemes; ++s)
        if (cfg.schemes[s] == rec.scheme)
          rec.cpu_seconds = mean_seconds[level * n_schemes + s];
    }
  }
  return records;
}

SlopeFit fit_order(const std::vector<ConvergenceRecord>& records, SchemeId scheme,
                   int window) {
  std::vector<std::pair<double, double>> pts;  // (dt, rel_error), coarse first
  for (const auto& r : records) {
    if (r.scheme != scheme) continue;
    if (r.n_success == 0 || r.n_blowup > r.n_success) continue;  // failed cell
    if (!std::isfinite(r.rel_error) || r.rel_error <= 0.0) continue;
    pts.emplace_back(r.dt, r.rel_error);
  }
  std::sort(pts.begin(), pts.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  if (window > 0 && static_cast<std::size_t>(window) < pts.size())
    pts.erase(pts.begin(), pts.end() - window);
  if (pts.size() < 3)
    throw InsufficientData("fit_order needs >= 3 usable levels for " +
                           scheme_name(scheme));

  const double n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [dt, err] : pts) {
    const double x = std::log2(dt);
    const double y = std::log2(err);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  SlopeFit fit;
  fit.scheme = scheme;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - fit.slope * (sxy - sx * sy / n);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  for (const auto& [dt, err] : pts) fit.levels_used.push_back(dt);
  return fit;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void emit_report(const ExperimentConfig& cfg,
                 const std::vector<ConvergenceRecord>& records,
                 const std::vector<SlopeFit>& fits, const std::string& out_dir,
                 double precompute_seconds) {
  if (records.empty()) throw InvalidConfig("emit_report requires records");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  const std::string csv_path = out_dir + "/records.csv";
  {
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot write " + csv_path);
    csv << "scheme,dt,rms_error,rel_error,n_success,n_blowup,cpu_seconds\n";
    for (const auto& r : records)
      csv << scheme_name(r.scheme) << ',' << fmt17(r.dt) << ','
          << fmt17(r.rms_error) << ',' << fmt17(r.rel_error) << ','
          << r.n_success << ',' << r.n_blowup << ',' << fmt17(r.cpu_seconds)
          << '\n';
    if (!csv) throw IoError("failed writing " + csv_path);
  }

  json jfits = json::array();
  for (const auto& f : fits)
    jfits.push_back(json{{"scheme", scheme_name(f.scheme)},
                         {"slope", f.slope},
                         {"intercept", f.intercept},
                         {"r_squared", f.r_squared},
                         {"levels_used", f.levels_used}});
  json j;
  j["config"] = json::parse(cfg.to_json_text());
  j["seed"] = cfg.seed;
  j["fits"] = jfits;
  j["records_csv"] = "records.csv";
  j["precompute_seconds"] = precompute_seconds;
  j["flags"] = {
      {"esspifsrk22_formulation",
       cfg.esspifsrk22_printed_form ? "printed_double_exponential" : "isherwood"},
      {"setdrk2_a2", "(exp(z)-1-z)/z^2"},
      {"ssp33_final_weights", "1/3, 2/3"},
      {"srk4_weights", "classical 1/6 1/3 1/3 1/6 over stages 1-4"},
      {"dispersion_sign", "L(k) = -c0 i k + c2 k^2 + c3 i k^3 - c4 k^4"},
      {"levy_area", "(J_ij - J_ji)/2"},
      {"contour_n_points", cfg.contour.n_points},
      {"contour_radius", cfg.contour.radius},
      {"coupled_paths", true},
      {"reference_shares_paths", true},
  };
  const std::string json_path = out_dir + "/report.json";
  std::ofstream out(json_path);
  if (!out) throw IoError("cannot write " + json_path);
  out << j.dump(2) << '\n';
}

std::vector<ConvergenceRecord> parse_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty records file");
  std::vector<ConvergenceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ConvergenceRecord r;
    std::getline(ss, field, ',');
    r.scheme = scheme_from_name(field);
    std::getline(ss, field, ',');
    r.dt = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    r.rms_error = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    r.rel_error = std::strtod(field.c_str(), nullptr);
    std::getline(ss, field, ',');
    r.n_success = std::atoi(field.c_str());
    std::getline(ss, field, ',');
    r.n_blowup = std::atoi(field.c_str());
    std::getline(ss, field, ',');
    r.cpu_seconds = std::strtod(field.c_str(), nullptr);
    records.push_back(r);
  }
  return records;
}

bool universal_blowup(const std::vector<ConvergenceRecord>& records) {
  if (records.empty()) return false;
  for (const auto& r : records)
    if (r.n_success > 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Simulation snapshots

namespace {

void write_snapshot_csv(const std::string& path, const std::vector<double>& x,
                        const std::vector<double>& u) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "x,u\n";
  for (std::size_t j = 0; j < x.size(); ++j)
    out << fmt17(x[j]) << ',' << fmt17(u[j]) << '\n';
}

void write_snapshot_bin(const std::string& path, double t,
                        const std::vector<double>& u) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write " + path);
  std::fwrite("SNAP", 1, 4, f);
  const std::uint64_t n = u.size();
  std::fwrite(&n, sizeof n, 1, f);
  std::fwrite(&t, sizeof t, 1, f);
  std::fwrite(u.data(), sizeof(double), u.size(), f);
  std::fclose(f);
}

}  // namespace

SimulateResult simulate(const ExperimentConfig& cfg, int snapshots,
                        const std::string& out_dir, bool binary_format) {
  if (snapshots < 1) throw ConfigError("snapshots must be >= 1");
  const RunPlan plan = make_plan(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);

  long long n = 0;
  divides_to_tolerance(cfg.t_max, cfg.dt_base, &n);
  const auto n_steps = static_cast<std::size_t>(n);
  const BrownianPaths paths =
      generate_paths(cfg.seed, 0, plan.problem.channels(), n_steps, cfg.dt_base);

  std::vector<std::size_t> snap_steps;
  for (int jj = 0; jj < snapshots; ++jj) {
    const std::size_t k =
        snapshots == 1
            ? n_steps
            : static_cast<std::size_t>(std::llround(
                  static_cast<double>(jj) * static_cast<double>(n_steps) /
                  (snapshots - 1)));
    snap_steps.push_back(k);
  }

  auto stepper = make_stepper(plan.problem, cfg.schemes.front(), cfg.dt_base,
                              stepper_options(cfg, 0));
  SimulateResult result;
  std::size_t cursor = 0;
  StepObserver observer = [&](std::size_t k, double t, const StateVector& u) {
    while (cursor < snap_steps.size() && snap_steps[cursor] == k) {
      const std::vector<double> ur = plan.grid->to_real(u);
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%04zu.%s", cursor,
                    binary_format ? "bin" : "csv");
      const std::string path = out_dir + "/" + name;
      if (binary_format) write_snapshot_bin(path, t, ur);
      else write_snapshot_csv(path, plan.grid->x(), ur);
      ++result.snapshots_written;
      ++cursor;
    }
  };
  Trajectory traj =
      integrate_path(plan.problem, *stepper, plan.u0, 0.0, paths, n_steps, observer);
  result.blew_up = traj.blew_up;
  return result;
}

void phi_check_csv(SchemeId scheme, const std::string& model, std::size_t nx,
                   double length, double dt, const std::string& out_csv,
                   const ContourConfig& contour) {
  if (!scheme_is_exponential(scheme) || scheme == SchemeId::SifrkGeneric ||
      scheme == SchemeId::Ifsrk4 || scheme == SchemeId::Esspifsrk22 ||
      scheme == SchemeId::Esspifsrk33)
    throw ConfigError("phi-check applies to ETD-type schemes");
  const GridPtr grid = make_grid(nx, length, 0.0);
  const std::vector<Cplx> lam = linear_symbol(model_coefficients(model), *grid);
  const EtdCoefficientSet set = etd_coefficient_set(scheme, lam, dt, contour);

  std::ofstream out(out_csv);
  if (!out) throw IoError("cannot write " + out_csv);
  out << "k,eigenvalue_re,eigenvalue_im,coeff_name,value_re,value_im\n";
  for (const auto& [name, values] : set.arrays)
    for (std::size_t k = 0; k < values.size(); ++k)
      out << k << ',' << fmt17(lam[k].real()) << ',' << fmt17(lam[k].imag())
          << ',' << name << ',' << fmt17(values[k].real()) << ','
          << fmt17(values[k].imag()) << '\n';
  if (!out) throw IoError("failed writing " + out_csv);
}

CommutativityReport classify_noise(const ExperimentConfig& cfg) {
  const GridPtr grid =
      make_grid(cfg.model.grid.nx, cfg.model.grid.length, cfg.model.grid.x0);
  SdeProblem problem = build_problem(grid, cfg.model.coefficients, cfg.model.noise);

  StateVector u0 = cfg.model.initial.kind == InitialSpec::Kind::Soliton
                       ? initial_soliton(*grid, cfg.model.initial.beta)
                       : initial_gaussian(*grid, cfg.model.initial.center,
                                          cfg.model.initial.sharpness);
  grid->apply_dealias(u0);

  // Probes: the initial condition plus two seeded smooth perturbations.
  std::vector<StateVector> probes{u0};
  std::mt19937_64 rng(cfg.seed + 0x5EEDULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double scale = 0.05 * std::max(norm_l2(u0), 1.0);
  for (int p = 0; p < 2; ++p) {
    StateVector v = u0;
    for (std::size_t m = 1; m <= 5 && m < v.size() / 2; ++m) {
      const Cplx c(unif(rng), unif(rng));
      v[m] += scale * c / static_cast<double>(m * m);
      v[v.size() - m] += scale * std::conj(c) / static_cast<double>(m * m);
    }
    grid->apply_dealias(v);
    probes.push_back(std::move(v));
  }
  return commutativity_report(problem, probes);
}

}  // namespace stochetd
