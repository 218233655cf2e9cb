#pragma once

#include <vector>

#include "emtime/core/field.hpp"
#include "emtime/core/potential.hpp"
#include "emtime/core/stencil.hpp"

namespace emtime {

/// Orthonormal system states φ_n on a shared x grid with energies ε_n.
class ChannelBasis {
 public:
  /// Throws ShapeError on grid mismatch and DegenerateInputError when the
  /// states are not orthonormal to 1e-8.
  ChannelBasis(Grid1D x_grid, std::vector<ComplexField1D> states, std::vector<double> energies);

  const Grid1D& x_grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<ComplexField1D>& states() const noexcept { return states_; }
  const ComplexField1D& state(std::size_t n) const { return states_.at(n); }
  const std::vector<double>& energies() const noexcept { return energies_; }

  /// Largest |⟨φ_m|φ_n⟩ − δ_mn|.
  double orthonormality_defect() const;

  /// First k states.
  ChannelBasis truncated(std::size_t k) const;

 private:
  Grid1D grid_;
  std::vector<ComplexField1D> states_;
  std::vector<double> energies_;
};

/// Dense Dirichlet matrix of −ħ²/2m ∂²_x + V(x) on the interior nodes of `grid`.
std::vector<double> system_hamiltonian_matrix(const std::vector<double>& potential, double m, double hbar,
                                              const Grid1D& grid, StencilOrder order);

/// Lowest k eigenstates of −ħ²/2m ∂²_x + V(x) with Dirichlet walls. Each state is
/// real, trapezoid-normalized and positive at the maximum of |φ|.
ChannelBasis system_eigenstates(const std::vector<double>& potential, double m, double hbar, const Grid1D& grid,
                                std::size_t k, StencilOrder order = StencilOrder::second);
ChannelBasis system_eigenstates(const Potential1D& V, double m, double hbar, const Grid1D& grid, std::size_t k,
                                StencilOrder order = StencilOrder::second);

}  // namespace emtime
