#include "stochetd/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace stochetd {

std::string scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::Ssp22: return "ssp22";
    case SchemeId::Ssp33: return "ssp33";
    case SchemeId::Srk4: return "srk4";
    case SchemeId::SifrkGeneric: return "sifrk_generic";
    case SchemeId::Ifsrk4: return "ifsrk4";
    case SchemeId::Esspifsrk22: return "esspifsrk22";
    case SchemeId::Esspifsrk33: return "esspifsrk33";
    case SchemeId::Setdrk2: return "setdrk2";
    case SchemeId::Setdrk3: return "setdrk3";
    case SchemeId::Setdrk4: return "setdrk4";
    case SchemeId::Sifem: return "sifem";
    case SchemeId::Setdm10: return "setdm10";
    case SchemeId::Setdm01: return "setdm01";
    case SchemeId::Csetdrk1: return "csetdrk1";
  }
  throw InvalidConfig("unknown scheme id");
}

SchemeId scheme_from_name(const std::string& name) {
  for (SchemeId id : all_scheme_ids())
    if (scheme_name(id) == name) return id;
  throw InvalidConfig("unknown scheme name '" + name + "'");
}

std::vector<SchemeId> all_scheme_ids() {
  return {SchemeId::Ssp22,       SchemeId::Ssp33,       SchemeId::Srk4,
          SchemeId::SifrkGeneric, SchemeId::Ifsrk4,      SchemeId::Esspifsrk22,
          SchemeId::Esspifsrk33, SchemeId::Setdrk2,     SchemeId::Setdrk3,
          SchemeId::Setdrk4,     SchemeId::Sifem,       SchemeId::Setdm10,
          SchemeId::Setdm01,     SchemeId::Csetdrk1};
}

bool scheme_is_ito(SchemeId id) {
  switch (id) {
    case SchemeId::Sifem:
    case SchemeId::Setdm10:
    case SchemeId::Setdm01:
    case SchemeId::Csetdrk1:
      return true;
    default:
      return false;
  }
}

bool scheme_is_exponential(SchemeId id) {
  switch (id) {
    case SchemeId::Ssp22:
    case SchemeId::Ssp33:
    case SchemeId::Srk4:
      return false;
    default:
      return true;
  }
}

int deterministic_order(SchemeId id) {
  switch (id) {
    case SchemeId::Ssp22:
    case SchemeId::Esspifsrk22:
    case SchemeId::Setdrk2:
      return 2;
    case SchemeId::Ssp33:
    case SchemeId::Esspifsrk33:
    case SchemeId::Setdrk3:
      return 3;
    case SchemeId::Srk4:
    case SchemeId::Ifsrk4:
    case SchemeId::Setdrk4:
      return 4;
    case SchemeId::Sifem:
    case SchemeId::Setdm10:
    case SchemeId::Setdm01:
    case SchemeId::Csetdrk1:
      return 1;
    case SchemeId::SifrkGeneric:
      return 0;  // set by the supplied tableau
  }
  return 0;
}

OrderProfile order_profile(SchemeId id) {
  const int p = deterministic_order(id);
  OrderProfile q;
  q.p_d = p;
  q.p_dc = std::floor(p / 2.0);
  q.p_c = p >= 1 ? 1.0 : 0.0;
  q.p_s = 0.5;
  return q;
}

namespace {

// ---------------------------------------------------------------------------
// Shared evaluation helpers

void check_stage_finite(const StateVector& v, const char* scheme, int stage) {
  if (!all_finite(v))
    throw NonFiniteError(std::string(scheme) + ": non-finite value at stage " +
                         std::to_string(stage));
}

// Modified drift F = f + sum g_m w_m, routed through the fused forcing when
// the problem provides one.
StateVector eval_modified_drift(const SdeProblem& p, double t, const StateVector& u,
                                const std::vector<double>& w) {
  if (p.linear_part && p.combined_forcing) {
    StateVector out = p.combined_forcing(t, u, w);
    const auto& lam = *p.linear_part;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += lam[i] * u[i];
    return out;
  }
  return modified_field(p.drift, p.diffusions, t, u, w);
}

// Modified nonlinear remainder 𝒩 = N + sum g_m w_m (IF/ETD schemes).
StateVector eval_modified_nonlinear(const SdeProblem& p, double t,
                                    const StateVector& u,
                                    const std::vector<double>& w) {
  if (!p.linear_part) throw MissingLinearPart("scheme requires a linear part");
  if (p.combined_forcing) return p.combined_forcing(t, u, w);
  return modified_field(p.nonlinear, p.diffusions, t, u, w);
}

StateVector diag_times(const std::vector<Cplx>& d, const StateVector& v) {
  StateVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = d[i] * v[i];
  return out;
}

// y += d .* x
void add_diag_times(const std::vector<Cplx>& d, const StateVector& x, StateVector& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += d[i] * x[i];
}

// ---------------------------------------------------------------------------
// SRK named forms (Shu-Osher / classical arrangements as printed)

// Shu-Osher combinations are evaluated in increment form,
//   alpha u + beta (v + dt F) = u + beta ((v - u) + dt F),
// so coefficient rounding (1/3 + 2/3 != 1 in binary) biases only the O(dt)
// increment instead of contracting the whole state once per step.

StateVector srk_ssp22(const SdeProblem& p, double t, const StateVector& u,
                      double dt, const std::vector<double>& w) {
  StateVector f0 = eval_modified_drift(p, t, u, w);
  check_stage_finite(f0, "ssp22", 1);
  StateVector u1 = u;
  axpy(dt, f0, u1);
  StateVector f1 = eval_modified_drift(p, t + dt, u1, w);
  check_stage_finite(f1, "ssp22", 2);
  StateVector out = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] += 0.5 * ((u1[i] - u[i]) + dt * f1[i]);
  return out;
}

StateVector srk_ssp33(const SdeProblem& p, double t, const StateVector& u,
                      double dt, const std::vector<double>& w) {
  StateVector f0 = eval_modified_drift(p, t, u, w);
  check_stage_finite(f0, "ssp33", 1);
  StateVector u1 = u;
  axpy(dt, f0, u1);
  StateVector f1 = eval_modified_drift(p, t + dt, u1, w);
  check_stage_finite(f1, "ssp33", 2);
  StateVector u2 = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    u2[i] += 0.25 * ((u1[i] - u[i]) + dt * f1[i]);
  StateVector f2 = eval_modified_drift(p, t + 0.5 * dt, u2, w);
  check_stage_finite(f2, "ssp33", 3);
  StateVector out = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] += (2.0 / 3.0) * ((u2[i] - u[i]) + dt * f2[i]);
  return out;
}

StateVector srk_rk4(const SdeProblem& p, double t, const StateVector& u,
                    double dt, const std::vector<double>& w) {
  StateVector f1 = eval_modified_drift(p, t, u, w);
  check_stage_finite(f1, "srk4", 1);
  StateVector u2 = u;
  axpy(0.5 * dt, f1, u2);
  StateVector f2 = eval_modified_drift(p, t + 0.5 * dt, u2, w);
  check_stage_finite(f2, "srk4", 2);
  StateVector u3 = u;
  axpy(0.5 * dt, f2, u3);
  StateVector f3 = eval_modified_drift(p, t + 0.5 * dt, u3, w);
  check_stage_finite(f3, "srk4", 3);
  StateVector u4 = u;
  axpy(dt, f3, u4);
  StateVector f4 = eval_modified_drift(p, t + dt, u4, w);
  check_stage_finite(f4, "srk4", 4);
  StateVector out = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] += dt * (f1[i] / 6.0 + f2[i] / 3.0 + f3[i] / 3.0 + f4[i] / 6.0);
  return out;
}

// ---------------------------------------------------------------------------
// SIFRK propagator table: e^{scale * L * dt} for the node scales a scheme needs.

struct PropagatorTable {
  double dt = 0.0;
  std::vector<std::pair<double, std::vector<Cplx>>> entries;

  const std::vector<Cplx>& at(double scale) const {
    for (const auto& [s, v] : entries)
      if (s == scale) return v;
    throw CoefficientMismatch("propagator for node scale not precomputed");
  }
};

PropagatorTable build_propagators(const SdeProblem& p, double dt,
                                  const std::vector<double>& scales) {
  if (!p.linear_part) throw MissingLinearPart("SIFRK scheme requires a linear part");
  const auto& lam = *p.linear_part;
  PropagatorTable table;
  table.dt = dt;
  for (double s : scales) {
    bool seen = false;
    for (const auto& [s0, v] : table.entries)
      if (s0 == s) { seen = true; break; }
    if (seen) continue;
    std::vector<Cplx> e(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) e[i] = std::exp(s * dt * lam[i]);
    table.entries.emplace_back(s, std::move(e));
  }
  return table;
}

std::vector<double> sifrk_scales(const ButcherTableau& tab) {
  std::vector<double> scales;
  const std::size_t s = tab.stages();
  for (std::size_t i = 0; i < s; ++i) {
    scales.push_back(tab.c[i]);
    scales.push_back(1.0 - tab.c[i]);
    for (std::size_t j = 0; j < i; ++j)
      if (tab.a[i][j] != 0.0) scales.push_back(tab.c[i] - tab.c[j]);
  }
  scales.push_back(1.0);
  return scales;
}

StateVector sifrk_generic_impl(const SdeProblem& p, const ButcherTableau& tab,
                               const PropagatorTable& props, double t,
                               const StateVector& u, double dt,
                               const std::vector<double>& w) {
  const std::size_t s = tab.stages();
  std::vector<StateVector> forcing(s);
  for (std::size_t i = 0; i < s; ++i) {
    StateVector stage = diag_times(props.at(tab.c[i]), u);
    for (std::size_t j = 0; j < i; ++j) {
      if (tab.a[i][j] == 0.0) continue;
      const auto& e = props.at(tab.c[i] - tab.c[j]);
      for (std::size_t k = 0; k < stage.size(); ++k)
        stage[k] += dt * tab.a[i][j] * e[k] * forcing[j][k];
    }
    check_stage_finite(stage, "sifrk", static_cast<int>(i) + 1);
    forcing[i] = eval_modified_nonlinear(p, t + tab.c[i] * dt, stage, w);
  }
  StateVector out = diag_times(props.at(1.0), u);
  for (std::size_t i = 0; i < s; ++i) {
    if (tab.b[i] == 0.0) continue;
    const auto& e = props.at(1.0 - tab.c[i]);
    for (std::size_t k = 0; k < out.size(); ++k)
      out[k] += dt * tab.b[i] * e[k] * forcing[i][k];
  }
  check_stage_finite(out, "sifrk", static_cast<int>(s) + 1);
  return out;
}

StateVector esspifsrk22_impl(const SdeProblem& p, const PropagatorTable& props,
                             double t, const StateVector& u, double dt,
                             const std::vector<double>& w, bool printed_form) {
  const auto& e1 = props.at(1.0);
  StateVector n0 = eval_modified_nonlinear(p, t, u, w);
  StateVector k1(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) k1[i] = e1[i] * (u[i] + dt * n0[i]);
  check_stage_finite(k1, "esspifsrk22", 1);
  StateVector n1 = eval_modified_nonlinear(p, t + dt, k1, w);
  StateVector out(u.size());
  if (printed_form) {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = 0.5 * e1[i] * u[i] + 0.5 * e1[i] * (k1[i] + dt * n1[i]);
  } else {
    for (std::size_t i = 0; i < u.size(); ++i)
      out[i] = 0.5 * e1[i] * u[i] + 0.5 * (k1[i] + dt * n1[i]);
  }
  check_stage_finite(out, "esspifsrk22", 2);
  return out;
}

StateVector esspifsrk33_impl(const SdeProblem& p, const PropagatorTable& props,
                             double t, const StateVector& u, double dt,
                             const std::vector<double>& w) {
  const auto& e23 = props.at(2.0 / 3.0);
  const auto& e13 = props.at(1.0 / 3.0);
  const auto& e1 = props.at(1.0);
  const double c = 4.0 / 3.0;

  StateVector n0 = eval_modified_nonlinear(p, t, u, w);
  StateVector k1(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    k1[i] = 0.5 * e23[i] * u[i] + 0.5 * e23[i] * (u[i] + c * dt * n0[i]);
  check_stage_finite(k1, "esspifsrk33", 1);

  StateVector n1 = eval_modified_nonlinear(p, t + (2.0 / 3.0) * dt, k1, w);
  // (2/3) e u + (1/3)(k1 + c dt n1) in increment form about e u (see the
  // SSP combinations above; 1/3 + 2/3 rounds away from 1).
  StateVector k2(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Cplx eu = e23[i] * u[i];
    k2[i] = eu + (1.0 / 3.0) * ((k1[i] - eu) + c * dt * n1[i]);
  }
  check_stage_finite(k2, "esspifsrk33", 2);

  StateVector n2 = eval_modified_nonlinear(p, t + (2.0 / 3.0) * dt, k2, w);
  StateVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = (59.0 / 128.0) * e1[i] * u[i] +
             (15.0 / 128.0) * e1[i] * (u[i] + c * dt * n0[i]) +
             (27.0 / 64.0) * e13[i] * (k2[i] + c * dt * n2[i]);
  check_stage_finite(out, "esspifsrk33", 3);
  return out;
}

std::vector<double> sifrk_scales_for(SchemeId id) {
  switch (id) {
    case SchemeId::Ifsrk4: return sifrk_scales(tableau_rk4());
    case SchemeId::Esspifsrk22: return {1.0};
    case SchemeId::Esspifsrk33: return {1.0, 2.0 / 3.0, 1.0 / 3.0};
    default: throw InvalidConfig("not a named SIFRK scheme");
  }
}

// ---------------------------------------------------------------------------
// SETDRK recursions.

void validate_coeffs(const SdeProblem& p, const EtdCoefficientSet& coeffs,
                     const Increment& inc) {
  if (!p.linear_part) throw MissingLinearPart("SETDRK scheme requires a linear part");
  if (coeffs.dt != inc.dt)
    throw CoefficientMismatch("coefficient set built for dt=" +
                              std::to_string(coeffs.dt) + ", step has dt=" +
                              std::to_string(inc.dt));
  if (coeffs.operator_hash != operator_hash(*p.linear_part))
    throw CoefficientMismatch("coefficient set built for a different operator");
}

StateVector setdrk2_impl(const SdeProblem& p, const EtdCoefficientSet& cs, double t,
                         const StateVector& u, double dt,
                         const std::vector<double>& w) {
  const auto& efull = cs.at("exp_full");
  const auto& a1 = cs.at("A1");
  const auto& a2 = cs.at("A2");
  StateVector n0 = eval_modified_nonlinear(p, t, u, w);
  StateVector k1 = diag_times(efull, u);
  add_diag_times(a1, n0, k1);
  check_stage_finite(k1, "setdrk2", 1);
  StateVector n1 = eval_modified_nonlinear(p, t + dt, k1, w);
  StateVector out = k1;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a2[i] * (n1[i] - n0[i]);
  check_stage_finite(out, "setdrk2", 2);
  return out;
}

StateVector setdrk3_impl(const SdeProblem& p, const EtdCoefficientSet& cs, double t,
                         const StateVector& u, double dt,
                         const std::vector<double>& w) {
  const auto& ehalf = cs.at("exp_half");
  const auto& efull = cs.at("exp_full");
  StateVector n0 = eval_modified_nonlinear(p, t, u, w);
  StateVector k1 = diag_times(ehalf, u);
  add_diag_times(cs.at("B1"), n0, k1);
  check_stage_finite(k1, "setdrk3", 1);
  StateVector na = eval_modified_nonlinear(p, t + 0.5 * dt, k1, w);
  StateVector k2 = diag_times(efull, u);
  {
    const auto& b2 = cs.at("B2");
    for (std::size_t i = 0; i < k2.size(); ++i)
      k2[i] += b2[i] * (2.0 * na[i] - n0[i]);
  }
  check_stage_finite(k2, "setdrk3", 2);
  StateVector nb = eval_modified_nonlinear(p, t + dt, k2, w);
  StateVector out = diag_times(efull, u);
  add_diag_times(cs.at("B3"), n0, out);
  add_diag_times(cs.at("B4"), na, out);
  add_diag_times(cs.at("B5"), nb, out);
  check_stage_finite(out, "setdrk3", 3);
  return out;
}

StateVector setdrk4_impl(const SdeProblem& p, const EtdCoefficientSet& cs, double t,
                         const StateVector& u, double dt,
                         const std::vector<double>& w) {
  const auto& ehalf = cs.at("exp_half");
  const auto& efull = cs.at("exp_full");
  const auto& e0 = cs.at("E0");

  StateVector n0 = eval_modified_nonlinear(p, t, u, w);
  StateVector a = diag_times(ehalf, u);
  add_diag_times(e0, n0, a);
  check_stage_finite(a, "setdrk4", 1);

  StateVector na = eval_modified_nonlinear(p, t + 0.5 * dt, a, w);
  StateVector b = diag_times(ehalf, u);
  add_diag_times(e0, na, b);
  check_stage_finite(b, "setdrk4", 2);

  StateVector nb = eval_modified_nonlinear(p, t + 0.5 * dt, b, w);
  StateVector c = diag_times(ehalf, a);
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] += e0[i] * (2.0 * nb[i] - n0[i]);
  check_stage_finite(c, "setdrk4", 3);

  StateVector nc = eval_modified_nonlinear(p, t + dt, c, w);
  StateVector out = diag_times(efull, u);
  const auto& e1 = cs.at("E1");
  const auto& e2 = cs.at("E2");
  const auto& e3 = cs.at("E3");
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += e1[i] * n0[i] + e2[i] * (na[i] + nb[i]) + e3[i] * nc[i];
  check_stage_finite(out, "setdrk4", 4);
  return out;
}

// ---------------------------------------------------------------------------
// Ito one-step family.

StateVector ito_impl(const SdeProblem& p, SchemeId scheme,
                     const EtdCoefficientSet& cs, double t, const StateVector& u,
                     const Increment& inc, double z) {
  if (!p.ito) throw InvalidConfig("Ito-family scheme on a Stratonovich problem");
  const auto& efull = cs.at("exp_full");
  const double dt = inc.dt;

  // sum_m g_m dW^m at (t, u)
  auto noise_sum = [&](const StateVector& state) {
    StateVector acc(state.size(), Cplx(0.0, 0.0));
    for (std::size_t m = 0; m < p.diffusions.size(); ++m) {
      StateVector g = p.diffusions[m](t, state);
      axpy(Cplx(inc.dw[m], 0.0), g, acc);
    }
    return acc;
  };

  switch (scheme) {
    case SchemeId::Sifem: {
      StateVector n0 = p.nonlinear(t, u);
      StateVector gsum = noise_sum(u);
      StateVector out(u.size());
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = efull[i] * (u[i] + dt * n0[i] + gsum[i]);
      check_stage_finite(out, "sifem", 1);
      return out;
    }
    case SchemeId::Setdm10: {
      StateVector n0 = p.nonlinear(t, u);
      StateVector gsum = noise_sum(u);
      StateVector out = diag_times(efull, u);
      const auto& p1 = cs.at("P1");
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] += p1[i] * n0[i] + efull[i] * gsum[i];
      check_stage_finite(out, "setdm10", 1);
      return out;
    }
    case SchemeId::Setdm01: {
      if (p.channels() != 1)
        throw InvalidConfig("setdm01 is defined for a single noise channel");
      StateVector n0 = p.nonlinear(t, u);
      StateVector g = p.diffusions[0](t, u);
      StateVector out = diag_times(efull, u);
      const auto& p1 = cs.at("P1");
      const auto& v = cs.at("V");
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] += p1[i] * n0[i] + v[i] * g[i] * z;
      check_stage_finite(out, "setdm01", 1);
      return out;
    }
    case SchemeId::Csetdrk1: {
      StateVector n0 = p.nonlinear(t, u);
      StateVector gsum = noise_sum(u);
      StateVector out = diag_times(efull, u);
      const auto& p1 = cs.at("P1");
      for (std::size_t i = 0; i < u.size(); ++i)
        out[i] += p1[i] * (n0[i] + gsum[i] / dt);
      check_stage_finite(out, "csetdrk1", 1);
      return out;
    }
    default:
      throw InvalidConfig("not an Ito-family scheme");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Pure one-step maps.

StateVector step_srk(const SdeProblem& problem, const ButcherTableau& tab,
                     double t, const StateVector& u, const Increment& inc) {
  const std::vector<double> w = noise_weights(problem, inc);
  const double dt = inc.dt;
  const std::size_t s = tab.stages();
  std::vector<StateVector> forcing(s);
  for (std::size_t i = 0; i < s; ++i) {
    StateVector stage = u;
    for (std::size_t j = 0; j < i; ++j)
      if (tab.a[i][j] != 0.0) axpy(Cplx(dt * tab.a[i][j], 0.0), forcing[j], stage);
    forcing[i] = eval_modified_drift(problem, t + tab.c[i] * dt, stage, w);
    check_stage_finite(forcing[i], "srk", static_cast<int>(i) + 1);
  }
  StateVector out = u;
  for (std::size_t i = 0; i < s; ++i)
    if (tab.b[i] != 0.0) axpy(Cplx(dt * tab.b[i], 0.0), forcing[i], out);
  return out;
}

StateVector step_sifrk(const SdeProblem& problem, SchemeId scheme, double t,
                       const StateVector& u, const Increment& inc,
                       bool esspifsrk22_printed_form) {
  const std::vector<double> w = noise_weights(problem, inc);
  const PropagatorTable props =
      build_propagators(problem, inc.dt, sifrk_scales_for(scheme));
  switch (scheme) {
    case SchemeId::Ifsrk4:
      return sifrk_generic_impl(problem, tableau_rk4(), props, t, u, inc.dt, w);
    case SchemeId::Esspifsrk22:
      return esspifsrk22_impl(problem, props, t, u, inc.dt, w,
                              esspifsrk22_printed_form);
    case SchemeId::Esspifsrk33:
      return esspifsrk33_impl(problem, props, t, u, inc.dt, w);
    default:
      throw InvalidConfig("not a named SIFRK scheme");
  }
}

StateVector step_sifrk(const SdeProblem& problem, const ButcherTableau& tab,
                       double t, const StateVector& u, const Increment& inc) {
  const std::vector<double> w = noise_weights(problem, inc);
  const PropagatorTable props =
      build_propagators(problem, inc.dt, sifrk_scales(tab));
  return sifrk_generic_impl(problem, tab, props, t, u, inc.dt, w);
}

StateVector step_setdrk(const SdeProblem& problem, const EtdCoefficientSet& coeffs,
                        double t, const StateVector& u, const Increment& inc) {
  validate_coeffs(problem, coeffs, inc);
  const std::vector<double> w = noise_weights(problem, inc);
  switch (coeffs.scheme_id) {
    case SchemeId::Setdrk2: return setdrk2_impl(problem, coeffs, t, u, inc.dt, w);
    case SchemeId::Setdrk3: return setdrk3_impl(problem, coeffs, t, u, inc.dt, w);
    case SchemeId::Setdrk4: return setdrk4_impl(problem, coeffs, t, u, inc.dt, w);
    default: throw InvalidConfig("coefficient set is not for a SETDRK scheme");
  }
}

StateVector step_ito(const SdeProblem& problem, SchemeId scheme, double t,
                     const StateVector& u, const Increment& inc, double z) {
  if (!problem.linear_part)
    throw MissingLinearPart("Ito-family scheme requires a linear part");
  if (inc.dw.size() != problem.channels())
    throw DimensionMismatch("increment channel count mismatch");
  auto cs = cached_etd_coefficient_set(scheme, *problem.linear_part, inc.dt);
  return ito_impl(problem, scheme, *cs, t, u, inc, z);
}

// ---------------------------------------------------------------------------
// Steppers with precomputed tables.

namespace {

class SrkStepper final : public OneStepMethod {
 public:
  SrkStepper(SdeProblem problem, SchemeId id)
      : problem_(std::move(problem)), id_(id) {}
  SchemeId id() const override { return id_; }
  StateVector step(std::size_t, double t, const StateVector& u,
                   const Increment& inc) override {
    const std::vector<double> w = noise_weights(problem_, inc);
    switch (id_) {
      case SchemeId::Ssp22: return srk_ssp22(problem_, t, u, inc.dt, w);
      case SchemeId::Ssp33: return srk_ssp33(problem_, t, u, inc.dt, w);
      case SchemeId::Srk4: return srk_rk4(problem_, t, u, inc.dt, w);
      default: throw InvalidConfig("not an SRK scheme");
    }
  }

 private:
  SdeProblem problem_;
  SchemeId id_;
};

class SifrkStepper final : public OneStepMethod {
 public:
  SifrkStepper(SdeProblem problem, SchemeId id, double dt,
               const StepperOptions& opts)
      : problem_(std::move(problem)), id_(id), printed_(opts.esspifsrk22_printed_form) {
    if (id == SchemeId::SifrkGeneric) {
      if (!opts.sifrk_tableau)
        throw InvalidConfig("sifrk_generic needs a tableau in StepperOptions");
      tableau_ = *opts.sifrk_tableau;
      props_ = build_propagators(problem_, dt, sifrk_scales(*tableau_));
    } else {
      if (id == SchemeId::Ifsrk4) tableau_ = tableau_rk4();
      props_ = build_propagators(problem_, dt, sifrk_scales_for(id));
    }
  }
  SchemeId id() const override { return id_; }
  StateVector step(std::size_t, double t, const StateVector& u,
                   const Increment& inc) override {
    if (inc.dt != props_.dt)
      throw CoefficientMismatch("SIFRK propagators built for a different dt");
    const std::vector<double> w = noise_weights(problem_, inc);
    switch (id_) {
      case SchemeId::SifrkGeneric:
      case SchemeId::Ifsrk4:
        return sifrk_generic_impl(problem_, *tableau_, props_, t, u, inc.dt, w);
      case SchemeId::Esspifsrk22:
        return esspifsrk22_impl(problem_, props_, t, u, inc.dt, w, printed_);
      case SchemeId::Esspifsrk33:
        return esspifsrk33_impl(problem_, props_, t, u, inc.dt, w);
      default:
        throw InvalidConfig("not a SIFRK scheme");
    }
  }

 private:
  SdeProblem problem_;
  SchemeId id_;
  bool printed_;
  std::optional<ButcherTableau> tableau_;
  PropagatorTable props_;
};

class SetdrkStepper final : public OneStepMethod {
 public:
  SetdrkStepper(SdeProblem problem, SchemeId id, double dt,
                const StepperOptions& opts)
      : problem_(std::move(problem)), id_(id) {
    if (!problem_.linear_part)
      throw MissingLinearPart("SETDRK scheme requires a linear part");
    coeffs_ = cached_etd_coefficient_set(id, *problem_.linear_part, dt, opts.contour);
  }
  SchemeId id() const override { return id_; }
  StateVector step(std::size_t, double t, const StateVector& u,
                   const Increment& inc) override {
    return step_setdrk(problem_, *coeffs_, t, u, inc);
  }

 private:
  SdeProblem problem_;
  SchemeId id_;
  std::shared_ptr<const EtdCoefficientSet> coeffs_;
};

class ItoStepper final : public OneStepMethod {
 public:
  ItoStepper(SdeProblem problem, SchemeId id, double dt, const StepperOptions& opts)
      : problem_(std::move(problem)), id_(id), aux_seed_(opts.aux_seed) {
    if (!problem_.linear_part)
      throw MissingLinearPart("Ito-family scheme requires a linear part");
    coeffs_ = cached_etd_coefficient_set(id, *problem_.linear_part, dt, opts.contour);
  }
  SchemeId id() const override { return id_; }
  StateVector step(std::size_t step_index, double t, const StateVector& u,
                   const Increment& inc) override {
    if (coeffs_->dt != inc.dt)
      throw CoefficientMismatch("Ito coefficient set built for a different dt");
    if (inc.dw.size() != problem_.channels())
      throw DimensionMismatch("increment channel count mismatch");
    const double z = (id_ == SchemeId::Setdm01)
                         ? counter_gaussian(aux_seed_, step_index)
                         : inc.aux;
    return ito_impl(problem_, id_, *coeffs_, t, u, inc, z);
  }

 private:
  SdeProblem problem_;
  SchemeId id_;
  std::uint64_t aux_seed_;
  std::shared_ptr<const EtdCoefficientSet> coeffs_;
};

}  // namespace

std::unique_ptr<OneStepMethod> make_stepper(const SdeProblem& problem, SchemeId id,
                                            double dt, const StepperOptions& opts) {
  if (!(dt > 0.0)) throw InvalidConfig("stepper dt must be positive");
  if (scheme_is_ito(id) != problem.ito)
    throw InvalidConfig("scheme calculus (" +
                        std::string(scheme_is_ito(id) ? "Ito" : "Stratonovich") +
                        ") does not match the problem's");
  switch (id) {
    case SchemeId::Ssp22:
    case SchemeId::Ssp33:
    case SchemeId::Srk4:
      return std::make_unique<SrkStepper>(problem, id);
    case SchemeId::SifrkGeneric:
    case SchemeId::Ifsrk4:
    case SchemeId::Esspifsrk22:
    case SchemeId::Esspifsrk33:
      return std::make_unique<SifrkStepper>(problem, id, dt, opts);
    case SchemeId::Setdrk2:
    case SchemeId::Setdrk3:
    case SchemeId::Setdrk4:
      return std::make_unique<SetdrkStepper>(problem, id, dt, opts);
    case SchemeId::Sifem:
    case SchemeId::Setdm10:
    case SchemeId::Setdm01:
    case SchemeId::Csetdrk1:
      return std::make_unique<ItoStepper>(problem, id, dt, opts);
  }
  throw InvalidConfig("unknown scheme id");
}

Trajectory integrate_path(const SdeProblem& problem, OneStepMethod& stepper,
                          const StateVector& u0, double t0,
                          const BrownianPaths& paths, std::size_t n_steps,
                          const StepObserver& observer) {
  if (n_steps > paths.n_steps)
    throw InvalidConfig("path table has fewer steps than requested");
  if (paths.channels != problem.channels())
    throw DimensionMismatch("path table channel count mismatch");

  const double dt = paths.dt_fine;
  Increment inc;
  inc.dt = dt;
  inc.dw.resize(problem.channels());

  Trajectory traj;
  StateVector u = u0;
  if (observer) observer(0, t0, u);
  for (std::size_t k = 0; k < n_steps; ++k) {
    for (std::size_t m = 0; m < inc.dw.size(); ++m) inc.dw[m] = paths.at(m, k);
    bool failed = false;
    try {
      u = stepper.step(k, t0 + static_cast<double>(k) * dt, u, inc);
    } catch (const NonFiniteError&) {
      failed = true;
    }
    if (failed || !all_finite(u)) {
      traj.blew_up = true;
      traj.blowup_step = k + 1;
      traj.final_state = std::move(u);
      traj.final_time = t0 + static_cast<double>(k + 1) * dt;
      return traj;
    }
    if (observer) observer(k + 1, t0 + static_cast<double>(k + 1) * dt, u);
  }
  traj.final_state = std::move(u);
  traj.final_time = t0 + static_cast<double>(n_steps) * dt;
  return traj;
}

}  // namespace stochetd
