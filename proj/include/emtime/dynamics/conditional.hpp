#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "emtime/core/stencil.hpp"
#include "emtime/core/time_map.hpp"
#include "emtime/dynamics/tdse.hpp"
#include "emtime/semiclassics/wkb.hpp"

namespace emtime::dynamics {

struct ConditionalOptions {
  double qenviron_bound = 0.1;                       // largest tolerated qenviron residual in the window
  std::optional<std::pair<double, double>> window;   // R range; default is the whole grid
};

/// ψ_cond(x, t(R)) = Ψ(x, R)/χ_WKB(R) for every R node in the window, ordered by t.
/// Slices are not renormalized; their norms are reported. Throws ShapeError on
/// grid mismatch and DomainError when the WKB clock is outside its validity bound.
WavefunctionTrajectory conditional_from_composite(const ComplexField2D& Psi, const semiclassics::WKBState& wkb,
                                                  const TimeMap& tmap, const ConditionalOptions& opts = {});

struct ResidualOptions {
  StencilOrder order = StencilOrder::fourth;  // x stencil of H_S
};

/// Residual of (H_S + V_I − U_S(t) − iħ∂_t)ψ = 0 after removal of the purely
/// time-dependent U_S(t), plus the neglected-to-retained ratio
/// ρ = ‖(ħ²/2Mv²)∂²ψ̃/∂t²‖ / ‖ħ∂ψ̃/∂t‖ with ψ̃ = ψ·exp(−(i/ħ)∫U_S dt).
struct ConditionalResidual {
  double residual = 0.0;                // ‖r‖/‖ψ‖ over interior slices
  double rho = 0.0;
  std::vector<double> t;                // interior slice times
  std::vector<double> slice_residual;   // ‖r_k‖/‖ψ_k‖
  std::vector<cplx> U_S;                // removed potential per interior slice
  // Per-term norms over interior slices, each relative to ‖ψ‖.
  double system_term = 0.0;       // ‖H_S ψ‖
  double interaction_term = 0.0;  // ‖V_I ψ‖
  double time_term = 0.0;         // ‖ħ ∂_t ψ‖
  double U_S_term = 0.0;          // ‖U_S ψ‖
  double neglected_term = 0.0;    // ‖(ħ²/2Mv²)∂²ψ̃/∂t²‖
  double retained_term = 0.0;     // ‖ħ ∂ψ̃/∂t‖
};

/// U_S(t) is the complex projection ⟨ψ|(H_S + V_I − iħ∂_t)ψ⟩/⟨ψ|ψ⟩, the best
/// purely time-dependent potential. Time derivatives are three-point central
/// differences on the (possibly non-uniform) slice times; the first and last
/// slices are excluded from all norms. Throws ShapeError with fewer than 3 slices.
ConditionalResidual tdse_residual_of_conditional(const WavefunctionTrajectory& traj, const SystemPart& sys,
                                                 const Interaction& V_I, double M, double v,
                                                 const ResidualOptions& opts = {});

}  // namespace emtime::dynamics
