#include "stochetd/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stochetd {

namespace {

StateVector directional_derivative(const ProbeField& phi, const StateVector& u,
                                   const StateVector& v, double eps) {
  const double vn = norm_l2(v);
  if (vn < 1e-14) return StateVector(u.size(), Cplx(0.0, 0.0));
  const double h = eps / vn;  // u +- eps * v/||v||
  StateVector up = u, um = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    up[i] += h * v[i];
    um[i] -= h * v[i];
  }
  StateVector pp = phi(up);
  StateVector pm = phi(um);
  StateVector out(u.size());
  const double scale = vn / (2.0 * eps);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = (pp[i] - pm[i]) * scale;
  return out;
}

}  // namespace

StateVector lie_bracket(const ProbeField& f, const ProbeField& g,
                        const StateVector& u, double eps) {
  if (!(eps > 0.0)) throw InvalidConfig("lie_bracket needs eps > 0");
  StateVector fu = f(u);
  StateVector gu = g(u);
  StateVector dg_f = directional_derivative(g, u, fu, eps);
  StateVector df_g = directional_derivative(f, u, gu, eps);
  StateVector out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = dg_f[i] - df_g[i];
  return out;
}

std::string CommutativityReport::class_name() const {
  switch (classification) {
    case Class::NonCommutative: return "NonCommutative";
    case Class::Commutative: return "Commutative";
    case Class::DriftCommutative: return "DriftCommutative";
  }
  return "NonCommutative";
}

std::string CommutativityReport::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"drift_brackets\":[";
  for (std::size_t i = 0; i < drift_brackets.size(); ++i)
    os << (i ? "," : "") << drift_brackets[i];
  os << "],\"noise_brackets\":[";
  for (std::size_t i = 0; i < noise_brackets.size(); ++i) {
    os << (i ? "," : "") << "[";
    for (std::size_t j = 0; j < noise_brackets[i].size(); ++j)
      os << (j ? "," : "") << noise_brackets[i][j];
    os << "]";
  }
  os << "],\"tolerance\":" << tolerance << ",\"classification\":\""
     << class_name() << "\"}";
  return os.str();
}

CommutativityReport commutativity_report(const SdeProblem& problem,
                                         const std::vector<StateVector>& probes,
                                         double eps_rel, double tol) {
  if (probes.empty()) throw InvalidConfig("commutativity_report needs >= 1 probe");
  const std::size_t m = problem.channels();

  CommutativityReport rep;
  rep.tolerance = tol;
  rep.drift_brackets.assign(m, 0.0);
  rep.drift_scales.assign(m, 0.0);
  rep.noise_brackets.assign(m, std::vector<double>(m, 0.0));
  rep.noise_scales.assign(m, std::vector<double>(m, 0.0));

  ProbeField drift = [&problem](const StateVector& u) {
    return problem.drift(0.0, u);
  };
  std::vector<ProbeField> gs;
  for (std::size_t i = 0; i < m; ++i)
    gs.push_back([&problem, i](const StateVector& u) {
      return problem.diffusions[i](0.0, u);
    });

  for (const StateVector& u : probes) {
    const double un = std::max(norm_l2(u), 1e-300);
    const double eps = eps_rel * un;
    const double fn = norm_l2(drift(u));
    std::vector<double> gn(m);
    for (std::size_t i = 0; i < m; ++i) gn[i] = norm_l2(gs[i](u));

    for (std::size_t i = 0; i < m; ++i) {
      rep.drift_brackets[i] =
          std::max(rep.drift_brackets[i], norm_l2(lie_bracket(drift, gs[i], u, eps)));
      rep.drift_scales[i] = std::max(rep.drift_scales[i], fn * gn[i] / un);
      for (std::size_t j = i + 1; j < m; ++j) {
        const double bn = norm_l2(lie_bracket(gs[i], gs[j], u, eps));
        rep.noise_brackets[i][j] = std::max(rep.noise_brackets[i][j], bn);
        rep.noise_brackets[j][i] = rep.noise_brackets[i][j];
        const double sc = gn[i] * gn[j] / un;
        rep.noise_scales[i][j] = std::max(rep.noise_scales[i][j], sc);
        rep.noise_scales[j][i] = rep.noise_scales[i][j];
      }
    }
  }

  bool noise_commutes = true;
  for (std::size_t i = 0; i < m && noise_commutes; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (rep.noise_brackets[i][j] > tol * std::max(rep.noise_scales[i][j], 1e-300)) {
        noise_commutes = false;
        break;
      }
  bool drift_commutes = true;
  for (std::size_t i = 0; i < m; ++i)
    if (rep.drift_brackets[i] > tol * std::max(rep.drift_scales[i], 1e-300)) {
      drift_commutes = false;
      break;
    }

  rep.classification = !noise_commutes
                           ? CommutativityReport::Class::NonCommutative
                           : (drift_commutes
                                  ? CommutativityReport::Class::DriftCommutative
                                  : CommutativityReport::Class::Commutative);
  return rep;
}

}  // namespace stochetd
