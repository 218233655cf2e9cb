#pragma once

#include <vector>

#include "emtime/classical/flow.hpp"
#include "emtime/core/grid.hpp"
#include "emtime/core/potential.hpp"
#include "emtime/core/time_map.hpp"

namespace emtime::classical {

/// Environment degree of freedom used as a clock.
struct ClockModel {
  Potential1D V_env = Constant{0.0};
  double M = 1.0;
  double E_c = 1.0;
  Grid1D R_grid{0.0, 1.0, 3};
};

/// p(R) = √(2M(E_c − V_env(R))); TurningPointError when E_c ≤ V_env(R).
double clock_momentum(const ClockModel& clock, double R);

/// p(R) on every grid node; TurningPointError naming the first offending R.
std::vector<double> clock_momentum_table(const ClockModel& clock);

/// W_ε(R) = ∫ p dR′ by cumulative trapezoid, zero at the grid minimum.
std::vector<double> clock_action(const ClockModel& clock);

/// t(R) = M ∫ dR′/p(R′) by cumulative trapezoid, t = 0 at the grid minimum.
TimeMap clock_time_map(const ClockModel& clock);

/// E_S(1 − E_S/(2Mv²)).
double classical_energy_correction(double E_S, double M, double v);

/// Drives the reduced system with V_int(x, R(t)) through the clock map.
DrivenPotential driven_by_clock(const Coupling2D& V_int, const TimeMap& tmap);

}  // namespace emtime::classical
