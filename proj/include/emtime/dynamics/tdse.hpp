#pragma once

#include <functional>
#include <vector>

#include "emtime/core/field.hpp"
#include "emtime/core/potential.hpp"

namespace emtime::dynamics {

/// The reduced system: coordinate x with mass m in V_sys, Dirichlet walls at the grid ends.
struct SystemPart {
  Potential1D V_sys = Constant{0.0};
  double m = 1.0;
  double hbar = 1.0;
  Grid1D x_grid{-1.0, 1.0, 3};

  /// Throws DomainError unless m and hbar are positive.
  void validate() const;
};

/// V_I(x, t). An empty function means no interaction.
using Interaction = std::function<double(double x, double t)>;

struct WavefunctionTrajectory {
  std::vector<double> t;
  std::vector<ComplexField1D> psi;
  std::vector<double> norms;
};

struct TdseOptions {
  std::size_t store_every = 1;    // keep every n-th step; the final step is always kept
  double norm_tolerance = 1e-8;   // allowed |‖ψ0‖ − 1|
  double drift_per_1000 = 1e-10;  // allowed norm drift per 10³ steps
};

/// Crank–Nicolson with the three-point Laplacian and V_I evaluated at the step
/// midpoint. Throws DomainError for an unnormalized ψ0 or non-increasing times,
/// NumericalError when the tridiagonal solve produces non-finite values and
/// StabilityError when the norm drifts beyond the unitarity contract.
WavefunctionTrajectory propagate_tdse(const SystemPart& sys, const Interaction& V_I, const ComplexField1D& psi0,
                                      const std::vector<double>& t_grid, const TdseOptions& opts = {});

/// n + 1 evenly spaced times on [t0, t1].
std::vector<double> uniform_times(double t0, double t1, std::size_t n);

}  // namespace emtime::dynamics
