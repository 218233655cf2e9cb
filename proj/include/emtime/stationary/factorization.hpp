#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "emtime/core/composite.hpp"
#include "emtime/core/field.hpp"
#include "emtime/core/stencil.hpp"

namespace emtime::stationary {

enum class FactorMode { prescribed, self_consistent };

/// Ψ(x, R) = χ(R)·ψ(x, R) on a retained R window where χ is bounded away from zero.
struct FactorizedState {
  ComplexField1D chi;
  ComplexField2D psi;  // zero outside the window
  FactorMode mode = FactorMode::prescribed;
  std::size_t window_lo = 0;  // inclusive R indices
  std::size_t window_hi = 0;
  std::vector<cplx> U_S;  // per R node, zero outside the window
  std::vector<double> trace;  // self-consistent mode: ‖χ_{k+1} − χ_k‖ per iteration

  double R_lo() const { return chi.grid()[window_lo]; }
  double R_hi() const { return chi.grid()[window_hi]; }
};

struct FactorOptions {
  double threshold = 1e-8;  // relative to max |χ|
  /// Explicit window [R_lo, R_hi]; default is the span where |χ| exceeds the threshold.
  std::optional<std::pair<double, double>> window;
  StencilOrder order = StencilOrder::fourth;
};

/// ψ = Ψ/χ with χ taken verbatim. Throws NodeError listing the R values inside
/// the window where |χ| falls below the threshold.
FactorizedState factorize_prescribed(const ComplexField2D& Psi, const ComplexField1D& chi, const CompositeSpec& spec,
                                     const FactorOptions& opts = {});

/// U_S(R) = ∫dx ψ*[H_S + V_int − (ħ²/M)(χ′/χ)∂_R − (ħ²/2M)∂²_R]ψ on the window.
/// Throws WindowError when the window is too short for the R stencil.
std::vector<cplx> compute_U_S(const FactorizedState& state, const CompositeSpec& spec,
                              StencilOrder order = StencilOrder::fourth);

/// ‖[H_S + V_int − U_S − (ħ²/2M)∂²_R − (ħ²/M)(χ′/χ)∂_R]ψ‖ / ‖ψ‖ over the window,
/// using the U_S stored in `state`.
double residual_psidef(const FactorizedState& state, const CompositeSpec& spec,
                       StencilOrder order = StencilOrder::fourth);

/// Fixed-point iteration between U_S and the environment equation
/// (−ħ²/2M ∂²_R + V_env + U_S)χ = λχ, starting from the marginal amplitude
/// √∫|Ψ|²dx. χ is fixed real-positive at its maximum with unit norm. Throws
/// ConvergenceError carrying the iteration trace.
FactorizedState factorize_selfconsistent(const ComplexField2D& Psi, const CompositeSpec& spec, std::size_t max_iter,
                                         double tol, const FactorOptions& opts = {});

/// √∫|Ψ(x, R)|² dx per R node.
ComplexField1D marginal_amplitude(const ComplexField2D& Psi);

}  // namespace emtime::stationary
