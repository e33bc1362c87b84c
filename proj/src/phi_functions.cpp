#include "stochetd/phi_functions.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "stochetd/schemes.hpp"

namespace stochetd {

namespace {

Cplx eval_poly(const std::vector<double>& p, Cplx z) {
  Cplx acc(0.0, 0.0);
  for (std::size_t j = p.size(); j-- > 0;) acc = acc * z + p[j];
  return acc;
}

Cplx eval_numerator(const PhiFunction& f, Cplx z) {
  Cplx acc(0.0, 0.0);
  for (const auto& t : f.terms) acc += std::exp(t.exp_scale * z) * eval_poly(t.poly, z);
  return acc;
}

}  // namespace

Cplx phi_direct(const PhiFunction& f, Cplx z) {
  Cplx num = eval_numerator(f, z);
  for (int q = 0; q < f.denom_power; ++q) num /= z;
  return num;
}

namespace {

// Taylor evaluation around the removable singularity; the leading denom_power
// numerator coefficients vanish identically and are dropped. Used for contour
// nodes that land near z = 0, where the direct form loses digits to
// cancellation (the Kassam-Trefethen instability).
Cplx phi_series_eval(const PhiFunction& f, Cplx z) {
  constexpr int kTerms = 26;
  const int q = f.denom_power;
  Cplx value(0.0, 0.0);
  Cplx zpow(1.0, 0.0);
  for (int n = q; n < q + kTerms; ++n) {
    double cn = 0.0;
    for (const auto& t : f.terms) {
      for (int j = 0; j <= n && j < static_cast<int>(t.poly.size()); ++j) {
        double apow_over_fact = 1.0;  // exp_scale^(n-j)/(n-j)!
        for (int i = 1; i <= n - j; ++i) apow_over_fact *= t.exp_scale / i;
        cn += t.poly[j] * apow_over_fact;
      }
    }
    value += cn * zpow;
    zpow *= z;
  }
  return value;
}

Cplx phi_node_eval(const PhiFunction& f, Cplx z) {
  return (f.denom_power > 0 && std::abs(z) < 0.5) ? phi_series_eval(f, z)
                                                  : phi_direct(f, z);
}

}  // namespace

std::vector<Cplx> contour_phi_eval(const PhiFunction& f,
                                   std::span<const Cplx> eigenvalues, double dt,
                                   const ContourConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidConfig("contour_phi_eval: dt must be positive");
  if (cfg.n_points < 16) throw InvalidConfig("contour needs at least 16 nodes");
  if (!(cfg.radius > 0.0)) throw InvalidConfig("contour radius must be positive");

  const int n = cfg.n_points;
  std::vector<Cplx> roots(n);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    roots[k] = cfg.radius * Cplx(std::cos(a), std::sin(a));
  }

  std::vector<Cplx> out(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const Cplx z = dt * eigenvalues[i];
    Cplx acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) acc += phi_node_eval(f, z + roots[k]);
    out[i] = acc / static_cast<double>(n);
    if (!is_finite(out[i]))
      throw NonFiniteError("contour quadrature overflowed at eigenvalue " +
                           std::to_string(i));
  }
  return out;
}

namespace {

// Coefficient functions printed in the SETDRK methods (normalised so the
// scheme multiplies them by dt):
//   phi1      (e^z - 1)/z
//   phi1_half (e^{z/2} - 1)/z
//   a2        (e^z - 1 - z)/z^2          [Heun-consistent second coefficient]
//   b3        (-4 - z + e^z(4 - 3z + z^2))/z^3
//   b4        4(2 + z + e^z(-2 + z))/z^3
//   b5        (-4 - 3z - z^2 + e^z(4 - z))/z^3
//   e2        (4 + 2z + e^z(-4 + 2z))/z^3
//   m01var    (e^{2z} - 1)/(2z)          [Ito-isometry variance of SETDM01]
const std::unordered_map<std::string, PhiFunction>& phi_registry() {
  static const std::unordered_map<std::string, PhiFunction> reg = {
      {"phi1", {{{1.0, {1.0}}, {0.0, {-1.0}}}, 1}},
      {"phi1_half", {{{0.5, {1.0}}, {0.0, {-1.0}}}, 1}},
      {"a2", {{{1.0, {1.0}}, {0.0, {-1.0, -1.0}}}, 2}},
      {"b3", {{{0.0, {-4.0, -1.0}}, {1.0, {4.0, -3.0, 1.0}}}, 3}},
      {"b4", {{{0.0, {8.0, 4.0}}, {1.0, {-8.0, 4.0}}}, 3}},
      {"b5", {{{0.0, {-4.0, -3.0, -1.0}}, {1.0, {4.0, -1.0}}}, 3}},
      {"e2", {{{0.0, {4.0, 2.0}}, {1.0, {-4.0, 2.0}}}, 3}},
      {"m01var", {{{2.0, {0.5}}, {0.0, {-0.5}}}, 1}},
  };
  return reg;
}

std::vector<Cplx> direct_exp(std::span<const Cplx> eigenvalues, double dt,
                             double scale) {
  std::vector<Cplx> out(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    out[i] = std::exp(scale * dt * eigenvalues[i]);
  return out;
}

std::vector<Cplx> dt_scaled_contour(const std::string& phi_name,
                                    std::span<const Cplx> eigenvalues, double dt,
                                    const ContourConfig& cfg) {
  std::vector<Cplx> v = contour_phi_eval(named_phi(phi_name), eigenvalues, dt, cfg);
  for (auto& z : v) z *= dt;
  return v;
}

}  // namespace

const PhiFunction& named_phi(const std::string& name) {
  const auto& reg = phi_registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw InvalidConfig("unknown phi function " + name);
  return it->second;
}

const std::vector<Cplx>& EtdCoefficientSet::at(const std::string& name) const {
  auto it = arrays.find(name);
  if (it == arrays.end())
    throw CoefficientMismatch("coefficient set has no array " + name);
  return it->second;
}

std::uint64_t operator_hash(std::span<const Cplx> eigenvalues) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a over the raw bytes
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001B3ULL;
    }
  };
  for (const Cplx& z : eigenvalues) {
    double re = z.real(), im = z.imag();
    mix(&re, sizeof re);
    mix(&im, sizeof im);
  }
  return h;
}

EtdCoefficientSet etd_coefficient_set(SchemeId scheme,
                                      std::span<const Cplx> eigenvalues, double dt,
                                      const ContourConfig& cfg) {
  if (!(dt > 0.0)) throw InvalidConfig("etd_coefficient_set: dt must be positive");

  EtdCoefficientSet set;
  set.scheme_id = scheme;
  set.dt = dt;
  set.operator_hash = operator_hash(eigenvalues);
  set.dimension = eigenvalues.size();

  auto& a = set.arrays;
  switch (scheme) {
    case SchemeId::Setdrk2:
      a["exp_full"] = direct_exp(eigenvalues, dt, 1.0);
      a["A1"] = dt_scaled_contour("phi1", eigenvalues, dt, cfg);
      a["A2"] = dt_scaled_contour("a2", eigenvalues, dt, cfg);
      break;
    case SchemeId::Setdrk3:
      a["exp_half"] = direct_exp(eigenvalues, dt, 0.5);
      a["exp_full"] = direct_exp(eigenvalues, dt, 1.0);
      a["B1"] = dt_scaled_contour("phi1_half", eigenvalues, dt, cfg);
      a["B2"] = dt_scaled_contour("phi1", eigenvalues, dt, cfg);
      a["B3"] = dt_scaled_contour("b3", eigenvalues, dt, cfg);
      a["B4"] = dt_scaled_contour("b4", eigenvalues, dt, cfg);
      a["B5"] = dt_scaled_contour("b5", eigenvalues, dt, cfg);
      break;
    case SchemeId::Setdrk4:
      a["exp_half"] = direct_exp(eigenvalues, dt, 0.5);
      a["exp_full"] = direct_exp(eigenvalues, dt, 1.0);
      a["E0"] = dt_scaled_contour("phi1_half", eigenvalues, dt, cfg);
      a["E1"] = dt_scaled_contour("b3", eigenvalues, dt, cfg);
      a["E2"] = dt_scaled_contour("e2", eigenvalues, dt, cfg);
      a["E3"] = dt_scaled_contour("b5", eigenvalues, dt, cfg);
      break;
    case SchemeId::Sifem:
      a["exp_full"] = direct_exp(eigenvalues, dt, 1.0);
      break;
    case SchemeId::Setdm10:
    case SchemeId::Csetdrk1:
      a["exp_full"] = direct_exp(eigenvalues, dt, 1.0);
      a["P1"] = dt_scaled_contour("phi1", eigenvalues, dt, cfg);
      break;
    case SchemeId::Setdm01: {
      a["exp_full"] = direct_exp(eigenvalues, dt, 1.0);
      a["P1"] = dt_scaled_contour("phi1", eigenvalues, dt, cfg);
      std::vector<Cplx> v = dt_scaled_contour("m01var", eigenvalues, dt, cfg);
      for (auto& z : v) z = std::sqrt(z);
      a["V"] = std::move(v);
      break;
    }
    default:
      throw InvalidConfig("scheme has no exponential coefficient set");
  }

  for (const auto& [name, vec] : a)
    for (const Cplx& z : vec)
      if (!is_finite(z))
        throw NonFiniteError("non-finite entry in coefficient array " + name);
  return set;
}

std::shared_ptr<const EtdCoefficientSet> cached_etd_coefficient_set(
    SchemeId scheme, std::span<const Cplx> eigenvalues, double dt,
    const ContourConfig& cfg) {
  struct Key {
    int scheme;
    std::uint64_t dt_bits;
    std::uint64_t op_hash;
    int n_points;
    std::uint64_t radius_bits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = static_cast<std::uint64_t>(k.scheme);
      h = h * 0x100000001B3ULL ^ k.dt_bits;
      h = h * 0x100000001B3ULL ^ k.op_hash;
      h = h * 0x100000001B3ULL ^ static_cast<std::uint64_t>(k.n_points);
      h = h * 0x100000001B3ULL ^ k.radius_bits;
      return static_cast<std::size_t>(h);
    }
  };
  static std::mutex mu;
  static std::unordered_map<Key, std::shared_ptr<const EtdCoefficientSet>, KeyHash> cache;

  std::uint64_t dt_bits, radius_bits;
  std::memcpy(&dt_bits, &dt, 8);
  std::memcpy(&radius_bits, &cfg.radius, 8);
  const Key key{static_cast<int>(scheme), dt_bits, operator_hash(eigenvalues),
                cfg.n_points, radius_bits};

  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto set = std::make_shared<const EtdCoefficientSet>(
      etd_coefficient_set(scheme, eigenvalues, dt, cfg));
  cache.emplace(key, set);
  return set;
}

}  // namespace stochetd
