#include "emtime/dynamics/emergence_scan.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>

#include "../stationary/dirichlet1d.hpp"
#include "emtime/classical/clock.hpp"
#include "emtime/core/channel_basis.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/fit.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/dynamics/conditional.hpp"
#include "emtime/semiclassics/wkb.hpp"
#include "emtime/stationary/channels.hpp"
#include "emtime/stationary/hamiltonian.hpp"

namespace emtime::dynamics {

EmergencePoint emergence_point(const QuantumEmergenceSetup& s, double M) {
  if (!(M > 0.0) || !(s.v > 0.0) || !(s.hbar > 0.0) || !(s.m > 0.0))
    throw DomainError("emergence_point: M, v, m and hbar must be positive");
  if (!(s.R_max > s.R_min) || !(s.x_max > s.x_min)) throw DomainError("emergence_point: empty box");
  const double L = s.R_max - s.R_min;
  const double ramp = s.taper * L, cut = ramp + s.margin * L;
  if (!(2.0 * cut < L)) throw DomainError("emergence_point: taper and margin leave no flat window");

  EmergencePoint pt;
  pt.M = M;
  const Grid1D xg(s.x_min, s.x_max, s.nx);
  const double k = M * s.v / s.hbar;
  auto nR = static_cast<std::size_t>(std::ceil(L * k / (2.0 * std::numbers::pi) * s.points_per_wavelength)) + 1;
  nR = std::max(nR, s.min_nR);
  nR += (nR % 2 == 0) ? 1 : 0;
  pt.nR = nR;
  const Grid1D Rg(s.R_min, s.R_max, nR);

  CompositeSpec spec;
  spec.M = M;
  spec.m = s.m;
  spec.hbar = s.hbar;
  spec.V_env = Constant{0.0};
  spec.V_sys = s.V_sys;
  spec.V_int = s.V_int;

  const auto ground = system_eigenstates(s.V_sys, s.m, s.hbar, xg, 1, s.order);
  // Aim at the box level of the uncoupled ground channel nearest the nominal clock momentum.
  const double level = std::max(1.0, std::round(k * L / std::numbers::pi));
  const double kj = level * std::numbers::pi / L;
  const double E_target = s.hbar * s.hbar * kj * kj / (2.0 * M) + ground.energies()[0];
  const stationary::Hamiltonian2D H(spec, Grid2D(xg, Rg), s.order);
  const auto pairs = stationary::solve_eigenpairs(H, E_target, s.candidates, s.seed);

  // The state whose system part is mostly in the ground channel.
  std::size_t best = 0;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto d = stationary::channel_project(pairs[j].field, ground);
    const double wgt = std::pow(norm(d.kappa[0]), 2);
    if (wgt > pt.channel0_weight) {
      pt.channel0_weight = wgt;
      best = j;
    }
  }
  pt.E = pairs[best].energy;
  pt.eigen_residual = pairs[best].residual;
  const auto plus = stationary::directed_component(pairs[best].field, s.taper);
  const double lo = s.R_min + cut, hi = s.R_max - cut;

  // Ū_S = ⟨H_S + V_I⟩ of the directed state over the window.
  const auto wx = stationary::detail::trapezoid_weights(xg);
  const auto Vs = tabulate(s.V_sys, xg);
  const double c = -s.hbar * s.hbar / (2.0 * s.m * xg.spacing() * xg.spacing());
  double num = 0.0, den = 0.0;
  std::vector<double> V(xg.size());
  std::vector<cplx> Hrow(xg.size());
  for (std::size_t iR = 0; iR < nR; ++iR) {
    if (Rg[iR] < lo || Rg[iR] > hi) continue;
    for (std::size_t ix = 0; ix < xg.size(); ++ix) V[ix] = Vs[ix] + eval(s.V_int, xg[ix], Rg[iR]);
    const auto row = plus.slice(iR);
    stationary::detail::apply_dirichlet_1d(row.values(), Hrow, V, c, s.order);
    for (std::size_t ix = 0; ix < xg.size(); ++ix) {
      num += wx[ix] * (std::conj(row[ix]) * Hrow[ix]).real();
      den += wx[ix] * std::norm(row[ix]);
    }
  }
  if (!(den > 0.0)) throw DegenerateInputError("emergence_point: directed component vanishes in the window");
  pt.U_S = num / den;
  pt.E_c = pt.E - pt.U_S;
  if (!(pt.E_c > 0.0)) throw TurningPointError("emergence_point: clock energy is not positive", {s.R_min});

  const classical::ClockModel clock{Constant{0.0}, M, pt.E_c, Rg};
  const auto wkb = semiclassics::wkb_environment(clock, s.hbar);
  const auto tmap = classical::clock_time_map(clock);
  ConditionalOptions copt;
  copt.window = std::make_pair(lo, hi);
  const auto traj = conditional_from_composite(plus, wkb, tmap, copt);

  double vsum = 0.0, vmin = INFINITY, vmax = -INFINITY;
  std::size_t count = 0;
  for (std::size_t iR = 0; iR < nR; ++iR) {
    if (Rg[iR] < lo || Rg[iR] > hi) continue;
    const double vv = wkb.p[iR] / M;
    vsum += vv;
    vmin = std::min(vmin, vv);
    vmax = std::max(vmax, vv);
    ++count;
  }
  pt.v_mean = vsum / static_cast<double>(count);
  pt.v_spread = std::max(vmax - pt.v_mean, pt.v_mean - vmin);
  pt.Mv2 = M * pt.v_mean * pt.v_mean;

  const SystemPart sys{s.V_sys, s.m, s.hbar, xg};
  const auto& V_int = s.V_int;
  const Interaction V_I = [&V_int, &tmap](double x, double t) { return eval(V_int, x, tmap.R_at(t)); };
  ResidualOptions ropt;
  ropt.order = s.order;
  const auto res = tdse_residual_of_conditional(traj, sys, V_I, M, pt.v_mean, ropt);
  pt.residual = res.residual;
  pt.rho = res.rho;
  pt.rho_estimate = pt.U_S / (2.0 * pt.Mv2);
  pt.ok = true;
  return pt;
}

EmergenceReport emergence_scan(const QuantumEmergenceSetup& setup, const std::vector<double>& masses) {
  if (masses.size() < 3) throw DomainError("emergence_scan: need at least 3 scan points");
  for (std::size_t i = 1; i < masses.size(); ++i)
    if (!(masses[i] > masses[i - 1])) throw DomainError("emergence_scan: masses must increase");
  if (!(masses.front() > 0.0) || masses.back() / masses.front() < 30.0)
    throw DomainError("emergence_scan: scan must span at least a factor 30 in clock kinetic energy");

  EmergenceReport rep;
  rep.points.resize(masses.size());
  const auto n = static_cast<std::ptrdiff_t>(masses.size());
#pragma omp parallel for schedule(dynamic) if (setup.parallel_points)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      rep.points[k] = emergence_point(setup, masses[k]);
    } catch (const std::exception& e) {
      rep.points[k] = EmergencePoint{};
      rep.points[k].M = masses[k];
      rep.points[k].error = e.what();
    }
  }
  std::vector<double> x, rho, res;
  for (const auto& p : rep.points) {
    if (!p.ok) continue;
    x.push_back(p.Mv2);
    rho.push_back(p.rho);
    res.push_back(p.residual);
  }
  bool positive = x.size() >= 2;
  for (double r : rho) positive = positive && r > 0.0;
  rep.slope = positive ? loglog_slope(x, rho) : 0.0;
  rep.monotone = res.size() >= 2 && strictly_decreasing(res);
  return rep;
}

}  // namespace emtime::dynamics
