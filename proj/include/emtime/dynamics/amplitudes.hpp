#pragma once

#include <vector>

#include "emtime/core/channel_basis.hpp"
#include "emtime/dynamics/tdse.hpp"

namespace emtime::dynamics {

/// Interaction-picture amplitudes: ψ(t) = Σ_n a_n(t) φ_n exp(−iε_n t/ħ).
struct AmplitudeSet {
  std::vector<double> t;
  std::vector<std::vector<cplx>> a;  // a[k][m] at time t[k]
  std::vector<double> energies;
  double population_drift = 0.0;     // max |Σ|a_m|² − Σ|a_m(0)|²|
};

struct AmplitudeOptions {
  double hbar = 1.0;
  std::size_t substeps = 1;        // RK4 steps per interval of the time grid
  double drift_tolerance = 1e-6;   // population drift that counts as step instability
};

/// Classic RK4 on iħ ȧ_m = Σ_n V_mn(t) a_n exp(i(ε_m − ε_n)t/ħ), with
/// V_mn(t) = ⟨φ_m|V_I(·, t)|φ_n⟩ recomputed at every stage time. Throws
/// DomainError for an unnormalized a0 and StabilityError on population drift.
AmplitudeSet propagate_amplitudes(const ChannelBasis& basis, const Interaction& V_I, const std::vector<cplx>& a0,
                                  const std::vector<double>& t_grid, const AmplitudeOptions& opts = {});

struct AmplitudeComparison {
  double max_deviation = 0.0;      // max over m, t of |a_m − exp(iε_m t/ħ)⟨φ_m|ψ(t)⟩|
  double defect = 0.0;             // ‖ψ0 − Σ a_m(0) φ_m‖
  std::vector<double> deviation;   // per stored time
  WavefunctionTrajectory grid;
  AmplitudeSet amplitudes;
};

/// Runs both propagators from ψ0 and compares channel amplitudes. Throws
/// DomainError when ψ0 is not representable in the basis (defect ≥ 1e-6).
AmplitudeComparison compare_amplitudes_vs_grid(const SystemPart& sys, const ChannelBasis& basis,
                                               const Interaction& V_I, const ComplexField1D& psi0,
                                               const std::vector<double>& t_grid,
                                               const AmplitudeOptions& amp_opts = {},
                                               const TdseOptions& tdse_opts = {});

}  // namespace emtime::dynamics
