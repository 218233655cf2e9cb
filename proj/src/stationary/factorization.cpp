#include "emtime/stationary/factorization.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "dirichlet1d.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::stationary {

namespace {

struct Window {
  std::size_t lo, hi;
};

Window select_window(const ComplexField1D& chi, const FactorOptions& opts) {
  const auto& g = chi.grid();
  double peak = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) peak = std::max(peak, std::abs(chi[i]));
  if (!(peak > 0.0)) throw DegenerateInputError("factorization: χ vanishes identically");
  const double thr = opts.threshold * peak;
  Window w{0, 0};
  if (opts.window) {
    const auto [a, b] = *opts.window;
    if (!(a < b)) throw DomainError("factorization: empty R window");
    const double eps = 1e-9 * g.spacing();
    bool found = false;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (g[i] >= a - eps && g[i] <= b + eps) {
        if (!found) w.lo = i;
        w.hi = i;
        found = true;
      }
    if (!found) throw WindowError("factorization: window contains no grid nodes");
  } else {
    std::size_t i = 0;
    while (std::abs(chi[i]) <= thr) ++i;
    w.lo = i;
    std::size_t j = chi.size() - 1;
    while (std::abs(chi[j]) <= thr) --j;
    w.hi = j;
  }
  std::vector<double> nodes;
  for (std::size_t i = w.lo; i <= w.hi; ++i)
    if (!(std::abs(chi[i]) > thr)) nodes.push_back(g[i]);
  if (!nodes.empty()) {
    const std::string what =
        "factorization: |χ| below threshold at " + std::to_string(nodes.size()) + " R nodes in window";
    throw NodeError(what, std::move(nodes));
  }
  return w;
}

// Derivatives along R of ψ restricted to the window, and the operator
// Lψ = [H_S + V_int − (ħ²/M)(χ′/χ)∂_R − (ħ²/2M)∂²_R]ψ on window columns.
std::vector<cplx> apply_psidef(const FactorizedState& st, const CompositeSpec& spec, StencilOrder order) {
  const auto& g = st.psi.grid();
  const std::size_t nx = g.nx(), lo = st.window_lo, hi = st.window_hi, nw = hi - lo + 1;
  if (nw < static_cast<std::size_t>(2 * stencil_radius(order) + 3))
    throw WindowError("factorization: window of " + std::to_string(nw) + " nodes is too short for the R stencil");
  const double hR = g.R().spacing(), hx = g.x().spacing();
  const double hb2 = spec.hbar * spec.hbar;

  std::vector<cplx> chi_w(nw);
  for (std::size_t j = 0; j < nw; ++j) chi_w[j] = st.chi[lo + j];
  const auto dchi = first_derivative(std::span<const cplx>(chi_w), hR, order);

  std::vector<cplx> out(nx * nw);
  std::vector<cplx> col(nw);
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t j = 0; j < nw; ++j) col[j] = st.psi(ix, lo + j);
    const auto d1 = first_derivative(std::span<const cplx>(col), hR, order);
    const auto d2 = second_derivative(std::span<const cplx>(col), hR, order);
    for (std::size_t j = 0; j < nw; ++j)
      out[j * nx + ix] = -(hb2 / spec.M) * (dchi[j] / chi_w[j]) * d1[j] - (hb2 / (2.0 * spec.M)) * d2[j];
  }
  const double cx = -hb2 / (2.0 * spec.m * hx * hx);
  std::vector<double> V(nx);
  std::vector<cplx> row(nx), hrow(nx);
  for (std::size_t j = 0; j < nw; ++j) {
    const double R = g.R()[lo + j];
    for (std::size_t ix = 0; ix < nx; ++ix) {
      V[ix] = eval(spec.V_sys, g.x()[ix]) + eval(spec.V_int, g.x()[ix], R);
      row[ix] = st.psi(ix, lo + j);
    }
    detail::apply_dirichlet_1d(row, hrow, V, cx, order);
    for (std::size_t ix = 0; ix < nx; ++ix) out[j * nx + ix] += hrow[ix];
  }
  return out;
}

}  // namespace

ComplexField1D marginal_amplitude(const ComplexField2D& Psi) {
  const auto& g = Psi.grid();
  const auto wx = detail::trapezoid_weights(g.x());
  ComplexField1D out(g.R());
  for (std::size_t iR = 0; iR < g.nR(); ++iR) {
    double s = 0.0;
    for (std::size_t ix = 0; ix < g.nx(); ++ix) s += wx[ix] * std::norm(Psi(ix, iR));
    out[iR] = std::sqrt(s);
  }
  return out;
}

FactorizedState factorize_prescribed(const ComplexField2D& Psi, const ComplexField1D& chi, const CompositeSpec& spec,
                                     const FactorOptions& opts) {
  if (!(chi.grid() == Psi.grid().R())) throw ShapeError("factorize_prescribed: χ grid differs from the R grid of Ψ");
  spec.validate();
  const Window w = select_window(chi, opts);
  FactorizedState st{chi, ComplexField2D(Psi.grid()), FactorMode::prescribed, w.lo, w.hi, {}, {}};
  const std::size_t nx = Psi.grid().nx();
  for (std::size_t iR = w.lo; iR <= w.hi; ++iR) {
    const cplx c = chi[iR];
    for (std::size_t ix = 0; ix < nx; ++ix) st.psi(ix, iR) = Psi(ix, iR) / c;
  }
  st.U_S = compute_U_S(st, spec, opts.order);
  return st;
}

std::vector<cplx> compute_U_S(const FactorizedState& st, const CompositeSpec& spec, StencilOrder order) {
  const auto& g = st.psi.grid();
  const auto Lpsi = apply_psidef(st, spec, order);
  const auto wx = detail::trapezoid_weights(g.x());
  const std::size_t nx = g.nx();
  std::vector<cplx> U(g.nR(), 0.0);
  for (std::size_t iR = st.window_lo; iR <= st.window_hi; ++iR) {
    const std::size_t j = iR - st.window_lo;
    cplx s = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) s += wx[ix] * std::conj(st.psi(ix, iR)) * Lpsi[j * nx + ix];
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw LocatedError("compute_U_S: non-finite value", {g.R()[iR]});
    U[iR] = s;
  }
  return U;
}

double residual_psidef(const FactorizedState& st, const CompositeSpec& spec, StencilOrder order) {
  if (st.U_S.size() != st.psi.grid().nR()) throw ShapeError("residual_psidef: U_S table missing");
  const auto& g = st.psi.grid();
  const auto Lpsi = apply_psidef(st, spec, order);
  const auto wx = detail::trapezoid_weights(g.x());
  const std::size_t nx = g.nx(), nw = st.window_hi - st.window_lo + 1;
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < nw; ++j) {
    const double wR = g.R().spacing() * ((j == 0 || j + 1 == nw) ? 0.5 : 1.0);
    const std::size_t iR = st.window_lo + j;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const cplx p = st.psi(ix, iR);
      num += wR * wx[ix] * std::norm(Lpsi[j * nx + ix] - st.U_S[iR] * p);
      den += wR * wx[ix] * std::norm(p);
    }
  }
  if (!(den > 0.0)) throw DegenerateInputError("residual_psidef: ψ vanishes on the window");
  return std::sqrt(num / den);
}

FactorizedState factorize_selfconsistent(const ComplexField2D& Psi, const CompositeSpec& spec, std::size_t max_iter,
                                         double tol, const FactorOptions& opts) {
  if (max_iter == 0) throw DomainError("factorize_selfconsistent: max_iter must be positive");
  const Grid1D& Rg = Psi.grid().R();
  const std::size_t nR = Rg.size(), n = nR - 2;
  const ComplexField1D modulus = normalize(marginal_amplitude(Psi));
  ComplexField1D chi = modulus;
  const double c = -spec.hbar * spec.hbar / (2.0 * spec.M * Rg.spacing() * Rg.spacing());
  const auto w = laplacian_weights(opts.order);
  const auto r = static_cast<std::ptrdiff_t>(stencil_radius(opts.order));
  std::vector<double> trace;

  for (std::size_t it = 0; it < max_iter; ++it) {
    const FactorizedState st = factorize_prescribed(Psi, chi, spec, opts);
    // Per-R normalized U_S, so Ψ need not carry unit norm.
    const auto wx = detail::trapezoid_weights(Psi.grid().x());
    std::vector<cplx> U(nR, 0.0);
    for (std::size_t iR = st.window_lo; iR <= st.window_hi; ++iR) {
      double pp = 0.0;
      for (std::size_t ix = 0; ix < Psi.grid().nx(); ++ix) pp += wx[ix] * std::norm(st.psi(ix, iR));
      U[iR] = st.U_S[iR] / pp;
    }
    // Outside the window U_S is continued by its nearest window value.
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t iR = std::clamp(i + 1, st.window_lo, st.window_hi);
      const auto ii = static_cast<Eigen::Index>(i);
      A(ii, ii) = eval(spec.V_env, Rg[i + 1]) + U[iR];
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + k;
        if (j >= 0 && j < static_cast<std::ptrdiff_t>(n)) A(ii, j) += c * w[static_cast<std::size_t>(k + r)];
      }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A);
    if (es.info() != Eigen::Success) throw ConvergenceError("factorize_selfconsistent: eigensolver failed", trace);
    Eigen::Index best = 0;
    double best_ov = -1.0;
    for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) {
      const auto v = es.eigenvectors().col(e);
      cplx ov = 0.0;
      for (std::size_t i = 0; i < n; ++i) ov += std::conj(chi[i + 1]) * v(static_cast<Eigen::Index>(i));
      const double a = std::abs(ov) / v.norm();
      if (a > best_ov) {
        best_ov = a;
        best = e;
      }
    }
    const auto v = es.eigenvectors().col(best);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cplx gauge = std::conj(v(imax)) / std::abs(v(imax));
    // Modulus from the normalization condition (ψ|ψ) = 1, phase from the solve.
    ComplexField1D next = modulus;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx z = gauge * v(static_cast<Eigen::Index>(i));
      if (std::abs(z) > 0.0) next[i + 1] *= z / std::abs(z);
    }
    ComplexField1D diff = next;
    for (std::size_t i = 0; i < nR; ++i) diff[i] -= chi[i];
    trace.push_back(norm(diff));
    chi = std::move(next);
    if (trace.back() < tol) {
      FactorizedState out = factorize_prescribed(Psi, chi, spec, opts);
      out.mode = FactorMode::self_consistent;
      out.trace = std::move(trace);
      return out;
    }
  }
  throw ConvergenceError("factorize_selfconsistent: no fixed point within " + std::to_string(max_iter) + " iterations",
                         trace);
}

}  // namespace emtime::stationary
