#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "emtime/core/composite.hpp"

namespace emtime::classical {

/// Coordinates and momenta. Composite ordering is (R, x); the reduced system uses (x).
struct PhaseState {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

struct Trajectory {
  std::vector<double> s;  // bookkeeping parameter (composite) or clock time t (reduced)
  std::vector<PhaseState> states;
  std::vector<double> W;       // accumulated ∫ p·dq
  std::vector<double> energy;  // H along the run
  double max_energy_drift = 0.0;  // max |H − H(0)| / max(|H(0)|, 1e-300)
  std::size_t steps = 0;          // steps actually used after any halving
};

struct LeapfrogOptions {
  double drift_tol = 1e-6;     // relative energy drift bound
  int max_halvings = 10;       // step halvings before StabilityError
  bool check_drift = true;
};

/// Leapfrog for H = p_R²/2M + p_x²/2m + V_env(R) + V_sys(x) + V_int(x, R) over
/// parameter span [0, span]. The step is halved while the energy drift exceeds
/// the bound; StabilityError when halvings run out.
Trajectory integrate_composite(const CompositeSpec& spec, const PhaseState& initial, double span,
                               std::size_t steps, const LeapfrogOptions& opt = {});

/// Time-dependent interaction seen by the reduced system.
struct DrivenPotential {
  std::function<double(double x, double t)> V;
  std::function<double(double x, double t)> dV_dx;
  std::function<double(double x, double t)> dV_dt;
};

/// Leapfrog for ẋ = p/m, ṗ = −∂x(V_sys + V_I(x, t)) on t ∈ [t0, t1]. Energy is
/// p²/2m + V_sys + V_I. The drift check applies only when V_I is absent.
Trajectory integrate_system_reduced(const Potential1D& V_sys, double m, const DrivenPotential* V_I, double x0,
                                    double p0, double t0, double t1, std::size_t steps,
                                    const LeapfrogOptions& opt = {});

}  // namespace emtime::classical
