#include "stochetd/problem.hpp"

namespace stochetd {

std::vector<double> noise_weights(const SdeProblem& problem, const Increment& inc) {
  if (!(inc.dt > 0.0)) throw InvalidConfig("increment dt must be positive");
  if (inc.dw.size() != problem.channels())
    throw DimensionMismatch("increment carries " + std::to_string(inc.dw.size()) +
                            " channels, problem has " +
                            std::to_string(problem.channels()));
  std::vector<double> w(inc.dw.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = inc.dw[m] / inc.dt;
  return w;
}

StateVector modified_field(const Field& base, const std::vector<Field>& diffusions,
                           double t, const StateVector& u,
                           const std::vector<double>& dw_over_dt) {
  StateVector out = base(t, u);
  for (std::size_t m = 0; m < dw_over_dt.size(); ++m) {
    StateVector g = diffusions[m](t, u);
    if (g.size() != out.size())
      throw DimensionMismatch("diffusion field dimension mismatch");
    axpy(Cplx(dw_over_dt[m], 0.0), g, out);
  }
  if (!all_finite(out)) throw NonFiniteError("modified drift is not finite");
  return out;
}

StateVector modified_drift(const SdeProblem& problem, double t,
                           const StateVector& u, const Increment& inc) {
  if (!all_finite(u)) throw NonFiniteError("state is not finite");
  const std::vector<double> w = noise_weights(problem, inc);
  return modified_field(problem.drift, problem.diffusions, t, u, w);
}

}  // namespace stochetd
