#include "emtime/dynamics/complex_time.hpp"

#include <cmath>
#include <string>

#include "crank_nicolson.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::dynamics {

ComplexTrajectory propagate_complex_time(const SystemPart& sys, const PathPotential& U_S, const PathInteraction& V_I,
                                         const ComplexField1D& psi0, const semiclassics::ComplexTimeMap& path,
                                         const ComplexTimeOptions& opts) {
  sys.validate();
  if (!(psi0.grid() == sys.x_grid)) throw ShapeError("propagate_complex_time: ψ0 lives on a different x grid");
  if (path.tau.size() != path.R_grid.size() || path.tau.size() < 2)
    throw ShapeError("propagate_complex_time: path needs at least two nodes");
  const auto& g = sys.x_grid;
  const std::size_t n = g.size();
  const auto Vs = tabulate(sys.V_sys, g);
  detail::CrankNicolson cn(n, sys.hbar * sys.hbar / (2.0 * sys.m * g.spacing() * g.spacing()));

  ComplexField1D psi = psi0;
  psi[0] = psi[n - 1] = 0.0;
  const double start = norm(psi);
  if (!(start > 0.0)) throw DegenerateInputError("propagate_complex_time: ψ0 is zero");
  ComplexTrajectory out{{path.R_grid[0]}, {path.tau[0]}, {psi}, {start}};
  std::vector<cplx> V(n);
  for (std::size_t k = 0; k + 1 < path.tau.size(); ++k) {
    const cplx dtau = path.tau[k + 1] - path.tau[k];
    const double Rm = 0.5 * (path.R_grid[k] + path.R_grid[k + 1]);
    const cplx u = U_S ? U_S(Rm) : cplx(0.0);
    for (std::size_t i = 0; i < n; ++i) V[i] = Vs[i] + (V_I ? V_I(g[i], Rm) : 0.0) + u;
    cn.step(psi.values(), V, cplx(0.0, 1.0) * dtau / (2.0 * sys.hbar));
    const double nk = norm(psi);
    if (!(nk <= opts.blowup * start))
      throw StabilityError("propagate_complex_time: norm grew to " + std::to_string(nk) + " at R = " +
                           std::to_string(path.R_grid[k + 1]));
    out.R.push_back(path.R_grid[k + 1]);
    out.tau.push_back(path.tau[k + 1]);
    out.psi.push_back(psi);
    out.norms.push_back(nk);
  }
  return out;
}

}  // namespace emtime::dynamics
