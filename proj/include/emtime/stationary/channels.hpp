#pragma once

#include <Eigen/Dense>
#include <vector>

#include "emtime/core/channel_basis.hpp"
#include "emtime/core/composite.hpp"
#include "emtime/core/field.hpp"

namespace emtime::stationary {

/// Eigenstates of H_S + V_int(·, R) at each R node.
struct BOStates {
  Grid1D x_grid;
  Grid1D R_grid;
  std::vector<std::vector<ComplexField1D>> phi;  // phi[iR][n]
  std::vector<std::vector<double>> U;            // U[n][iR]

  std::size_t channels() const noexcept { return U.size(); }
};

/// k lowest states at every R. The first R node fixes each state real-positive at
/// max |φ|; later nodes flip sign to keep ⟨φ_n(R_{i−1})|φ_n(R_i)⟩ > 0.
BOStates solve_bo_states(const CompositeSpec& spec, const Grid1D& x_grid, const Grid1D& R_grid, std::size_t k,
                         StencilOrder order = StencilOrder::fourth);

struct ChannelDecomposition {
  ChannelBasis basis;
  std::vector<ComplexField1D> kappa;  // κ_n(R) = ⟨φ_n|Ψ(·, R)⟩
  double defect = 0.0;                // 1 − Σ‖κ_n‖²/‖Ψ‖²
};

/// Throws ShapeError when Ψ and the basis live on different x grids.
ChannelDecomposition channel_project(const ComplexField2D& Psi, const ChannelBasis& basis);

/// V^eff_mn(R) = ⟨φ_m|H_S + V_int(·, R)|φ_n⟩ at each R node.
std::vector<Eigen::MatrixXcd> effective_coupling(const ChannelBasis& basis, const CompositeSpec& spec,
                                                 const Grid1D& R_grid, StencilOrder order = StencilOrder::fourth);

/// ‖[−ħ²/2M ∂²_R + V_env − E]κ_m + Σ_n V^eff_mn κ_n‖ per channel, Dirichlet in R.
std::vector<double> close_coupled_residual(const ChannelDecomposition& decomp, const CompositeSpec& spec, double E,
                                           StencilOrder order = StencilOrder::fourth);

struct EntanglementSpectrum {
  std::vector<double> sigma;  // nonincreasing Schmidt coefficients
  double purity = 0.0;        // Σσ⁴
};

/// Singular values of the quadrature-weighted Ψ matrix. Ψ must have unit norm.
EntanglementSpectrum entanglement_spectrum(const ComplexField2D& Psi);

/// Part of Ψ moving toward +R: windowed FFT along R keeping positive wave
/// numbers. `taper` is the fraction of the R span given to each cosine ramp.
ComplexField2D directed_component(const ComplexField2D& Psi, double taper = 0.1);

}  // namespace emtime::stationary
