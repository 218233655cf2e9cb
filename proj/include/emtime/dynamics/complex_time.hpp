#pragma once

#include <functional>
#include <vector>

#include "emtime/dynamics/tdse.hpp"
#include "emtime/semiclassics/quantum_time.hpp"

namespace emtime::dynamics {

struct ComplexTrajectory {
  std::vector<double> R;
  std::vector<cplx> tau;
  std::vector<ComplexField1D> psi;
  std::vector<double> norms;  // not conserved when Im Δτ ≠ 0
};

struct ComplexTimeOptions {
  double blowup = 1e6;  // norm growth factor treated as instability
};

/// Back-reaction U_S(R) and interaction V_I(x, R) along the clock path.
using PathPotential = std::function<cplx(double R)>;
using PathInteraction = std::function<double(double x, double R)>;

/// Trapezoidal steps of (H_S + V_I(τ) + U_S(τ) − iħ∂_τ)ψ = 0 along the τ
/// polyline, with potentials taken at the R midpoint of each step. Reduces to
/// propagate_tdse on a real path. Throws StabilityError when the norm exceeds
/// blowup × its initial value.
ComplexTrajectory propagate_complex_time(const SystemPart& sys, const PathPotential& U_S, const PathInteraction& V_I,
                                         const ComplexField1D& psi0, const semiclassics::ComplexTimeMap& path,
                                         const ComplexTimeOptions& opts = {});

}  // namespace emtime::dynamics
