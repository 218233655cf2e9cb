#include "emtime/classical/clock.hpp"

#include <cmath>
#include <string>

#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::classical {

double clock_momentum(const ClockModel& clock, double R) {
  if (!(clock.M > 0.0)) throw DomainError("clock mass must be positive");
  const double kin = clock.E_c - eval(clock.V_env, R);
  if (!(kin > 0.0)) throw TurningPointError("clock turning point or forbidden region at R = " + std::to_string(R), {R});
  return std::sqrt(2.0 * clock.M * kin);
}

std::vector<double> clock_momentum_table(const ClockModel& clock) {
  std::vector<double> p(clock.R_grid.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = clock_momentum(clock, clock.R_grid[i]);
  return p;
}

std::vector<double> clock_action(const ClockModel& clock) {
  const auto p = clock_momentum_table(clock);
  return cumulative_trapezoid(std::span<const double>(p), clock.R_grid.spacing());
}

TimeMap clock_time_map(const ClockModel& clock) {
  const auto p = clock_momentum_table(clock);
  std::vector<double> inv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) inv[i] = clock.M / p[i];
  auto t = cumulative_trapezoid(std::span<const double>(inv), clock.R_grid.spacing());
  return TimeMap(clock.R_grid.points(), std::move(t));
}

double classical_energy_correction(double E_S, double M, double v) {
  if (!(M > 0.0) || !(v > 0.0)) throw DomainError("M and v must be positive");
  return E_S * (1.0 - E_S / (2.0 * M * v * v));
}

DrivenPotential driven_by_clock(const Coupling2D& V_int, const TimeMap& tmap) {
  DrivenPotential d;
  d.V = [V_int, tmap](double x, double t) { return eval(V_int, x, tmap.R_at(t)); };
  d.dV_dx = [V_int, tmap](double x, double t) { return derivative_x(V_int, x, tmap.R_at(t)); };
  d.dV_dt = [V_int, tmap](double x, double t) { return derivative_R(V_int, x, tmap.R_at(t)) * tmap.dR_dt(t); };
  return d;
}

}  // namespace emtime::classical
