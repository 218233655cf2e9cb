#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "emtime/core/channel_basis.hpp"
#include "emtime/core/composite.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime {

void CompositeSpec::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
  };
  positive(M, "M");
  positive(m, "m");
  positive(hbar, "hbar");
  if (E && !std::isfinite(*E)) throw DomainError("E must be finite");
  if (E_c && !std::isfinite(*E_c)) throw DomainError("E_c must be finite");
  if (E && E_c && *E_c > *E) throw DomainError("E_c must not exceed E");
}

ChannelBasis::ChannelBasis(Grid1D x_grid, std::vector<ComplexField1D> states, std::vector<double> energies)
    : grid_(x_grid), states_(std::move(states)), energies_(std::move(energies)) {
  if (states_.empty()) throw ShapeError("channel basis is empty");
  if (energies_.size() != states_.size()) throw ShapeError("channel basis: one energy per state required");
  for (const auto& s : states_)
    if (!(s.grid() == grid_)) throw ShapeError("channel basis: state on a different grid");
  const double d = orthonormality_defect();
  if (!(d < 1e-8)) throw DegenerateInputError("channel basis not orthonormal (defect " + std::to_string(d) + ")");
}

double ChannelBasis::orthonormality_defect() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < states_.size(); ++a)
    for (std::size_t b = a; b < states_.size(); ++b) {
      const cplx ip = inner_product(states_[a], states_[b]);
      worst = std::max(worst, std::abs(ip - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

ChannelBasis ChannelBasis::truncated(std::size_t k) const {
  if (k == 0 || k > size()) throw ShapeError("truncated: channel count out of range");
  return ChannelBasis(grid_, {states_.begin(), states_.begin() + static_cast<std::ptrdiff_t>(k)},
                      {energies_.begin(), energies_.begin() + static_cast<std::ptrdiff_t>(k)});
}

std::vector<double> system_hamiltonian_matrix(const std::vector<double>& potential, double m, double hbar,
                                              const Grid1D& grid, StencilOrder order) {
  if (potential.size() != grid.size()) throw ShapeError("potential table does not match grid");
  const std::size_t n = grid.size() - 2;
  const auto w = laplacian_weights(order);
  const int r = stencil_radius(order);
  const double c = -hbar * hbar / (2.0 * m * grid.spacing() * grid.spacing());
  std::vector<double> H(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    H[i * n + i] += potential[i + 1];
    for (int k = -r; k <= r; ++k) {
      const auto j = static_cast<std::ptrdiff_t>(i) + k;
      if (j < 0 || j >= static_cast<std::ptrdiff_t>(n)) continue;
      H[i * n + static_cast<std::size_t>(j)] += c * w[static_cast<std::size_t>(k + r)];
    }
  }
  return H;
}

ChannelBasis system_eigenstates(const std::vector<double>& potential, double m, double hbar, const Grid1D& grid,
                                std::size_t k, StencilOrder order) {
  const std::size_t n = grid.size() - 2;
  if (k == 0 || k > n) throw ShapeError("system_eigenstates: requested " + std::to_string(k) + " states");
  const auto Hv = system_hamiltonian_matrix(potential, m, hbar, grid, order);
  const Eigen::Map<const Eigen::MatrixXd> H(Hv.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) throw ConvergenceError("system_eigenstates: dense eigensolver failed");
  const double scale = 1.0 / std::sqrt(grid.spacing());
  std::vector<ComplexField1D> states;
  std::vector<double> energies;
  for (std::size_t s = 0; s < k; ++s) {
    const auto v = es.eigenvectors().col(static_cast<Eigen::Index>(s));
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const double sign = v(imax) < 0.0 ? -1.0 : 1.0;
    std::vector<cplx> vals(grid.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) vals[i + 1] = sign * scale * v(static_cast<Eigen::Index>(i));
    states.emplace_back(grid, std::move(vals));
    energies.push_back(es.eigenvalues()(static_cast<Eigen::Index>(s)));
  }
  return ChannelBasis(grid, std::move(states), std::move(energies));
}

ChannelBasis system_eigenstates(const Potential1D& V, double m, double hbar, const Grid1D& grid, std::size_t k,
                                StencilOrder order) {
  return system_eigenstates(tabulate(V, grid), m, hbar, grid, k, order);
}

}  // namespace emtime
