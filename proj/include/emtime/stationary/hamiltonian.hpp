#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <span>
#include <vector>

#include "emtime/core/composite.hpp"
#include "emtime/core/field.hpp"
#include "emtime/core/stencil.hpp"
#include "emtime/kernels/kernels.hpp"

namespace emtime::stationary {

/// Matrix-free composite Hamiltonian
///   H = −ħ²/2M ∂²_R − ħ²/2m ∂²_x + V_env(R) + V_sys(x) + V_int(x, R)
/// with Dirichlet walls: boundary nodes are held at zero on input and output,
/// which makes the operator exactly symmetric under the trapezoid product.
class Hamiltonian2D {
 public:
  /// Throws ShapeError when either axis has fewer than 2r+3 nodes.
  Hamiltonian2D(CompositeSpec spec, Grid2D grid, StencilOrder order = StencilOrder::fourth);

  const CompositeSpec& spec() const noexcept { return spec_; }
  const Grid2D& grid() const noexcept { return grid_; }
  StencilOrder order() const noexcept { return order_; }
  /// Total potential sampled on the grid, x fastest.
  const std::vector<double>& potential() const noexcept { return potential_; }

  ComplexField2D apply(const ComplexField2D& f) const;
  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  /// Gershgorin bound on the spectral radius.
  double norm_estimate() const noexcept;

  /// Matrix on the interior nodes only, ordered x fastest; symmetric.
  Eigen::SparseMatrix<double> to_sparse() const;
  std::size_t interior_size() const noexcept { return (grid_.nx() - 2) * (grid_.nR() - 2); }

  kernels::Stencil2D stencil() const noexcept;

 private:
  CompositeSpec spec_;
  Grid2D grid_;
  StencilOrder order_;
  std::vector<double> potential_;
};

Hamiltonian2D assemble_tise(const CompositeSpec& spec, const Grid2D& grid,
                            StencilOrder order = StencilOrder::fourth);

/// Largest |Ψ| on the nodes next to the walls, relative to max |Ψ|.
double boundary_amplitude(const ComplexField2D& f);

struct EigenPair {
  double energy = 0.0;
  ComplexField2D field;   // unit trapezoid norm, real, positive at max |Ψ|
  double residual = 0.0;  // ‖(H − E)Ψ‖
};

struct EigenOptions {
  std::size_t krylov_dim = 0;  // 0: max(2k + 20, 40)
  std::size_t max_restarts = 60;
  double tol = 1e-10;  // relative residual required to accept a pair
};

/// k eigenpairs nearest E_target, sorted by energy. Shift-invert Lanczos with
/// full reorthogonalization, restarts with locking and a final probe from a
/// fresh random start to recover missed degenerate partners. Deterministic for
/// a fixed seed. Throws ConvergenceError carrying the attained residuals.
std::vector<EigenPair> solve_eigenpairs(const Hamiltonian2D& H, double E_target, std::size_t k,
                                        std::uint64_t seed = 1, const EigenOptions& opts = {});

}  // namespace emtime::stationary
