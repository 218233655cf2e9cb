#include "emtime/classical/emergence.hpp"

#include <boost/math/interpolators/cubic_hermite.hpp>
#include <cmath>
#include <exception>

#include "emtime/classical/clock.hpp"
#include "emtime/classical/flow.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/fit.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::classical {

ClassicalScanPoint classical_emergence_point(const ClassicalEmergenceSetup& st, double M) {
  CompositeSpec spec;
  spec.M = M;
  spec.m = st.m;
  spec.V_env = st.V_env;
  spec.V_sys = st.V_sys;
  spec.V_int = st.V_int;
  spec.validate();
  if (!(st.v > 0.0)) throw DomainError("clock velocity must be positive");

  PhaseState init{Eigen::Vector2d(st.R0, st.x0), Eigen::Vector2d(M * st.v, st.p0)};
  const Trajectory comp = integrate_composite(spec, init, st.span, st.steps);
  const std::size_t n = comp.states.size();

  ClassicalScanPoint pt;
  pt.M = M;
  pt.Mv2 = M * st.v * st.v;
  pt.E = comp.energy.front();
  pt.energy_drift = comp.max_energy_drift;

  std::vector<double> R(n), x(n), P(n), H_S(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = comp.states[k];
    R[k] = s.q[0];
    x[k] = s.q[1];
    P[k] = s.p[0];
    if (!(P[k] > 0.0)) throw TurningPointError("composite clock reversed direction", {R[k]});
    H_S[k] = s.p[1] * s.p[1] / (2.0 * st.m) + eval(st.V_sys, x[k]) + eval(st.V_int, x[k], R[k]);
  }

  switch (st.mode) {
    case BackReactionMode::mean: {
      const auto cum = cumulative_trapezoid(std::span<const double>(H_S), std::span<const double>(R));
      pt.U_S = cum.back() / (R.back() - R.front());
      break;
    }
    case BackReactionMode::initial:
      pt.U_S = H_S.front();
      break;
    case BackReactionMode::fixed:
      pt.U_S = st.fixed_U_S;
      break;
  }
  pt.E_c = pt.E - pt.U_S;

  // Reduced dynamics driven through the clock map of the same R range.
  ClockModel clock{st.V_env, M, pt.E_c, Grid1D(R.front(), R.back(), n)};
  const TimeMap tmap = clock_time_map(clock);
  const DrivenPotential drive = driven_by_clock(st.V_int, tmap);
  const double t_end = tmap.t().back();

  // Same step count as the composite run, so both share one discretization.
  LeapfrogOptions same_grid;
  same_grid.check_drift = false;
  const Trajectory red = integrate_system_reduced(st.V_sys, st.m, is_zero(st.V_int) ? nullptr : &drive, st.x0,
                                                  st.p0, 0.0, t_end, comp.steps, same_grid);

  std::vector<double> tr(red.s), xr(red.states.size()), vr(red.states.size());
  for (std::size_t j = 0; j < red.states.size(); ++j) {
    xr[j] = red.states[j].q[0];
    vr[j] = red.states[j].p[0] / st.m;
  }
  const boost::math::interpolators::cubic_hermite<std::vector<double>> x_red(std::move(tr), std::move(xr),
                                                                             std::move(vr));

  double ratio_sum = 0.0, shift_sum = 0.0, pred_sum = 0.0, v_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = std::min(tmap.t_at(R[k]), red.s.back());
    pt.D = std::max(pt.D, std::abs(x[k] - x_red(t)));
    v_sum += P[k] / M;
  }
  pt.v_mean = v_sum / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Full-energy clock reference: W_ε′ = P_E, so ∂W_S/∂R = P − P_E.
    const double P_E = std::sqrt(2.0 * M * (pt.E - eval(st.V_env, R[k])));
    const double v_E = P_E / M;
    const double dWs_dR = P[k] - P_E;
    const double E_S = -v_E * dWs_dR;  // −∂W_S/∂t
    ratio_sum += std::abs(dWs_dR) / (2.0 * P_E);
    shift_sum += H_S[k] - E_S;
    pred_sum += -E_S * E_S / (2.0 * M * pt.v_mean * pt.v_mean);
  }
  pt.ratio_measured = ratio_sum / static_cast<double>(n);
  pt.ratio_estimate = std::abs(pt.U_S) / (2.0 * pt.Mv2);
  pt.shift_measured = shift_sum / static_cast<double>(n);
  pt.shift_predicted = pred_sum / static_cast<double>(n);
  return pt;
}

ClassicalEmergenceReport classical_emergence_compare(const ClassicalEmergenceSetup& setup,
                                                     const std::vector<double>& masses) {
  ClassicalEmergenceReport rep;
  rep.points.resize(masses.size());
  std::vector<std::exception_ptr> errors(masses.size());
  // Scan points are independent; results land at their scan index.
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(masses.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      rep.points[k] = classical_emergence_point(setup, masses[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<double> x, D;
  for (const auto& p : rep.points) {
    x.push_back(p.Mv2);
    D.push_back(p.D);
  }
  rep.monotone = strictly_decreasing(D);
  bool positive = masses.size() >= 2;
  for (double d : D) positive = positive && d > 0.0;
  rep.slope = positive ? loglog_slope(x, D) : 0.0;
  return rep;
}

}  // namespace emtime::classical
