#include "emtime/stationary/channels.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <numbers>
#include <string>
#include <unsupported/Eigen/FFT>

#include "dirichlet1d.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/kernels/kernels.hpp"

namespace emtime::stationary {

BOStates solve_bo_states(const CompositeSpec& spec, const Grid1D& x_grid, const Grid1D& R_grid, std::size_t k,
                         StencilOrder order) {
  if (k == 0) throw DomainError("solve_bo_states: k must be at least 1");
  spec.validate();
  const std::size_t nR = R_grid.size();
  std::vector<std::optional<ChannelBasis>> slots(nR);
  std::vector<std::exception_ptr> errors(nR);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nR); ++i) {
    const auto iR = static_cast<std::size_t>(i);
    try {
      std::vector<double> V(x_grid.size());
      for (std::size_t ix = 0; ix < x_grid.size(); ++ix)
        V[ix] = eval(spec.V_sys, x_grid[ix]) + eval(spec.V_int, x_grid[ix], R_grid[iR]);
      slots[iR].emplace(system_eigenstates(V, spec.m, spec.hbar, x_grid, k, order));
    } catch (...) {
      errors[iR] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  BOStates out{x_grid, R_grid, std::vector<std::vector<ComplexField1D>>(nR), std::vector<std::vector<double>>(k)};
  for (std::size_t iR = 0; iR < nR; ++iR) {
    auto states = slots[iR]->states();
    for (std::size_t n = 0; n < k; ++n) {
      if (iR > 0 && inner_product(out.phi[iR - 1][n], states[n]).real() < 0.0) states[n] *= -1.0;
      out.U[n].push_back(slots[iR]->energies()[n]);
    }
    out.phi[iR] = std::move(states);
  }
  return out;
}

ChannelDecomposition channel_project(const ComplexField2D& Psi, const ChannelBasis& basis) {
  const auto& g = Psi.grid();
  if (!(basis.x_grid() == g.x())) throw ShapeError("channel_project: basis and Ψ use different x grids");
  const std::size_t nx = g.nx(), nR = g.nR(), nb = basis.size();
  std::vector<cplx> flat(nb * nx);
  for (std::size_t n = 0; n < nb; ++n)
    for (std::size_t ix = 0; ix < nx; ++ix) flat[n * nx + ix] = basis.state(n)[ix];
  const auto wx = detail::trapezoid_weights(g.x());
  std::vector<cplx> out(nb * nR);
  kernels::project_rows(flat, nb, wx, Psi.values(), nx, nR, out);

  ChannelDecomposition d{basis, {}, 0.0};
  double captured = 0.0;
  for (std::size_t n = 0; n < nb; ++n) {
    d.kappa.emplace_back(g.R(), std::vector<cplx>(out.begin() + static_cast<std::ptrdiff_t>(n * nR),
                                                  out.begin() + static_cast<std::ptrdiff_t>((n + 1) * nR)));
    const double kn = norm(d.kappa.back());
    captured += kn * kn;
  }
  const double total = norm(Psi);
  if (!(total > 0.0)) throw DegenerateInputError("channel_project: Ψ vanishes");
  d.defect = 1.0 - captured / (total * total);
  return d;
}

std::vector<Eigen::MatrixXcd> effective_coupling(const ChannelBasis& basis, const CompositeSpec& spec,
                                                 const Grid1D& R_grid, StencilOrder order) {
  const Grid1D& xg = basis.x_grid();
  const std::size_t nx = xg.size(), nb = basis.size();
  const auto wx = detail::trapezoid_weights(xg);
  const std::vector<double> Vs = tabulate(spec.V_sys, xg);
  const double cx = -spec.hbar * spec.hbar / (2.0 * spec.m * xg.spacing() * xg.spacing());
  std::vector<std::vector<cplx>> hphi(nb, std::vector<cplx>(nx));
  for (std::size_t n = 0; n < nb; ++n) detail::apply_dirichlet_1d(basis.state(n).values(), hphi[n], Vs, cx, order);

  std::vector<Eigen::MatrixXcd> out(R_grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(R_grid.size()); ++i) {
    const auto iR = static_cast<std::size_t>(i);
    std::vector<double> vi(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) vi[ix] = eval(spec.V_int, xg[ix], R_grid[iR]);
    Eigen::MatrixXcd Vm(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
    for (std::size_t m = 0; m < nb; ++m)
      for (std::size_t n = 0; n < nb; ++n) {
        cplx s = 0.0;
        const auto& pm = basis.state(m);
        const auto& pn = basis.state(n);
        for (std::size_t ix = 0; ix < nx; ++ix) s += wx[ix] * std::conj(pm[ix]) * (hphi[n][ix] + vi[ix] * pn[ix]);
        Vm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = s;
      }
    out[iR] = std::move(Vm);
  }
  return out;
}

std::vector<double> close_coupled_residual(const ChannelDecomposition& decomp, const CompositeSpec& spec, double E,
                                           StencilOrder order) {
  if (decomp.kappa.empty()) throw ShapeError("close_coupled_residual: empty decomposition");
  const Grid1D& Rg = decomp.kappa.front().grid();
  const std::size_t nR = Rg.size(), nb = decomp.kappa.size();
  const auto Veff = effective_coupling(decomp.basis, spec, Rg, order);
  std::vector<double> Ve(nR);
  for (std::size_t iR = 0; iR < nR; ++iR) Ve[iR] = eval(spec.V_env, Rg[iR]) - E;
  const double cR = -spec.hbar * spec.hbar / (2.0 * spec.M * Rg.spacing() * Rg.spacing());

  std::vector<double> res(nb);
  for (std::size_t m = 0; m < nb; ++m) {
    ComplexField1D r(Rg);
    detail::apply_dirichlet_1d(decomp.kappa[m].values(), r.values(), Ve, cR, order);
    for (std::size_t iR = 1; iR + 1 < nR; ++iR)
      for (std::size_t n = 0; n < nb; ++n)
        r[iR] += Veff[iR](static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) * decomp.kappa[n][iR];
    res[m] = norm(r);
  }
  return res;
}

EntanglementSpectrum entanglement_spectrum(const ComplexField2D& Psi) {
  const double nrm = norm(Psi);
  if (!(std::abs(nrm - 1.0) < 1e-8)) throw DomainError("entanglement_spectrum: Ψ must have unit norm");
  const auto& g = Psi.grid();
  const auto wx = detail::trapezoid_weights(g.x());
  const auto wR = detail::trapezoid_weights(g.R());
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(g.nx()), static_cast<Eigen::Index>(g.nR()));
  for (std::size_t iR = 0; iR < g.nR(); ++iR)
    for (std::size_t ix = 0; ix < g.nx(); ++ix)
      A(static_cast<Eigen::Index>(ix), static_cast<Eigen::Index>(iR)) = std::sqrt(wx[ix] * wR[iR]) * Psi(ix, iR);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  EntanglementSpectrum out;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()(i);
    out.sigma.push_back(s);
    out.purity += s * s * s * s;
  }
  return out;
}

ComplexField2D directed_component(const ComplexField2D& Psi, double taper) {
  if (!(taper >= 0.0 && taper <= 0.5)) throw DomainError("directed_component: taper must lie in [0, 0.5]");
  const auto& g = Psi.grid();
  const std::size_t nx = g.nx(), nR = g.nR();
  std::vector<double> win(nR, 1.0);
  const double ramp = taper * static_cast<double>(nR - 1);
  for (std::size_t i = 0; i < nR; ++i) {
    const double d = static_cast<double>(std::min(i, nR - 1 - i));
    if (d < ramp) win[i] = 0.5 * (1.0 - std::cos(std::numbers::pi * d / ramp));
  }
  ComplexField2D out(g);
  Eigen::FFT<double> fft;
  std::vector<cplx> row(nR), spec(nR), back(nR);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t i = 0; i < nR; ++i) row[i] = win[i] * Psi(ix, i);
    fft.fwd(spec, row);
    spec[0] = 0.0;
    for (std::size_t j = (nR + 1) / 2; j < nR; ++j) spec[j] = 0.0;
    fft.inv(back, spec);
    for (std::size_t i = 0; i < nR; ++i) out(ix, i) = back[i];
  }
  return out;
}

}  // namespace emtime::stationary
