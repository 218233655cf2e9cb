#include "emtime/dynamics/tdse.hpp"

#include <cmath>
#include <string>

#include "crank_nicolson.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::dynamics {

void SystemPart::validate() const {
  if (!(m > 0.0)) throw DomainError("system: m must be positive");
  if (!(hbar > 0.0)) throw DomainError("system: hbar must be positive");
}

std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
  if (n == 0 || !(t1 > t0)) throw DomainError("uniform_times: need n >= 1 and t1 > t0");
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
  return t;
}

WavefunctionTrajectory propagate_tdse(const SystemPart& sys, const Interaction& V_I, const ComplexField1D& psi0,
                                      const std::vector<double>& t_grid, const TdseOptions& opts) {
  sys.validate();
  if (!(psi0.grid() == sys.x_grid)) throw ShapeError("propagate_tdse: ψ0 lives on a different x grid");
  if (t_grid.size() < 2) throw DomainError("propagate_tdse: need at least two times");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw DomainError("propagate_tdse: times must increase strictly");
  const double n0 = norm(psi0);
  if (std::abs(n0 - 1.0) > opts.norm_tolerance)
    throw DomainError("propagate_tdse: ψ0 must be normalized (norm " + std::to_string(n0) + ")");
  const std::size_t stride = opts.store_every == 0 ? 1 : opts.store_every;

  const auto& g = sys.x_grid;
  const std::size_t n = g.size();
  const auto Vs = tabulate(sys.V_sys, g);
  detail::CrankNicolson cn(n, sys.hbar * sys.hbar / (2.0 * sys.m * g.spacing() * g.spacing()));

  ComplexField1D psi = psi0;
  psi[0] = psi[n - 1] = 0.0;
  const double start = norm(psi);
  WavefunctionTrajectory out;
  out.t.push_back(t_grid.front());
  out.psi.push_back(psi);
  out.norms.push_back(start);

  std::vector<cplx> V(n);
  const std::size_t steps = t_grid.size() - 1;
  for (std::size_t k = 0; k < steps; ++k) {
    const cplx dt(t_grid[k + 1] - t_grid[k], 0.0);
    const double tm = 0.5 * (t_grid[k] + t_grid[k + 1]);
    for (std::size_t i = 0; i < n; ++i) V[i] = Vs[i] + (V_I ? V_I(g[i], tm) : 0.0);
    cn.step(psi.values(), V, cplx(0.0, 1.0) * dt / (2.0 * sys.hbar));
    const bool keep = (k + 1) % stride == 0 || k + 1 == steps;
    if (!keep) continue;
    const double nk = norm(psi);
    const double allowed = opts.drift_per_1000 * std::max(1.0, static_cast<double>(k + 1) / 1000.0);
    if (std::abs(nk - start) > allowed)
      throw StabilityError("propagate_tdse: norm drift " + std::to_string(std::abs(nk - start)) + " after " +
                           std::to_string(k + 1) + " steps");
    out.t.push_back(t_grid[k + 1]);
    out.psi.push_back(psi);
    out.norms.push_back(nk);
  }
  return out;
}

}  // namespace emtime::dynamics
