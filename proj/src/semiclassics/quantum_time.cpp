#include "emtime/semiclassics/quantum_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/core/stencil.hpp"

namespace emtime::semiclassics {

double ComplexTimeMap::imaginary_fraction() const {
  double re = 0.0, im = 0.0;
  for (const cplx& t : tau) {
    re = std::max(re, std::abs(t.real()));
    im = std::max(im, std::abs(t.imag()));
  }
  if (re == 0.0) return im == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return im / re;
}

TimeMap ComplexTimeMap::real_part() const {
  std::vector<double> t(tau.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau[i].real();
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw DomainError("ComplexTimeMap::real_part: Re τ is not strictly increasing");
  return TimeMap(R_grid.points(), std::move(t));
}

ComplexTimeMap quantum_time(const ComplexField1D& chi, double M, const QuantumTimeOptions& opts) {
  if (!(M > 0.0) || !(opts.hbar > 0.0)) throw DomainError("quantum_time: M and hbar must be positive");
  const Grid1D& g = chi.grid();
  const std::size_t n = chi.size();
  std::vector<double> nodes;
  for (std::size_t i = 0; i < n; ++i)
    if (chi[i] == 0.0) nodes.push_back(g[i]);
  if (!nodes.empty()) throw NodeError("quantum_time: χ vanishes on the grid", std::move(nodes));

  std::vector<double> ln_abs(n), phase(n);
  for (std::size_t i = 0; i < n; ++i) {
    ln_abs[i] = std::log(std::abs(chi[i]));
    phase[i] = std::arg(chi[i]);
    if (i > 0) {
      // Unwrap: keep consecutive phase steps inside (−π, π].
      const double step = std::remainder(phase[i] - phase[i - 1], 2.0 * std::numbers::pi);
      phase[i] = phase[i - 1] + step;
    }
  }
  const double h = g.spacing();
  const auto dl = first_derivative(std::span<const double>(ln_abs), h);
  const auto dp = first_derivative(std::span<const double>(phase), h);

  std::vector<cplx> dlog(n);
  double dmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dlog[i] = cplx(dl[i], dp[i]);
    dmax = std::max(dmax, std::abs(chi[i] * dlog[i]));
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!(std::abs(chi[i] * dlog[i]) > opts.threshold * dmax)) nodes.push_back(g[i]);
  if (!nodes.empty())
    throw StationaryPointError("quantum_time: ∂χ/∂R vanishes at " + std::to_string(nodes.size()) + " nodes",
                               std::vector<double>(nodes));

  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = 1.0 / dlog[i];
  auto cum = cumulative_trapezoid(std::span<const cplx>(f), h);
  const cplx pref(0.0, M / opts.hbar);
  for (auto& c : cum) c *= pref;
  return {g, std::move(cum)};
}

ComplexTimeMap polar_time(const Grid1D& R_grid, const std::vector<double>& A, const std::vector<double>& W, double M,
                          double hbar) {
  if (A.size() != R_grid.size() || W.size() != R_grid.size()) throw ShapeError("polar_time: table size mismatch");
  if (!(M > 0.0) || !(hbar > 0.0)) throw DomainError("polar_time: M and hbar must be positive");
  const std::size_t n = A.size();
  std::vector<double> ln_A(n), nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(A[i] > 0.0)) nodes.push_back(R_grid[i]);
    ln_A[i] = std::log(A[i]);
  }
  if (!nodes.empty()) throw NodeError("polar_time: amplitude must be positive", std::move(nodes));
  const double h = R_grid.spacing();
  const auto dl = first_derivative(std::span<const double>(ln_A), h);
  const auto dW = first_derivative(std::span<const double>(W), h);
  // A/(A W̃′ − iħA′) = 1/(W̃′ − iħ (ln A)′)
  std::vector<cplx> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx den(dW[i], -hbar * dl[i]);
    if (den == 0.0) nodes.push_back(R_grid[i]);
    f[i] = M / den;
  }
  if (!nodes.empty()) throw StationaryPointError("polar_time: vanishing denominator", std::move(nodes));
  return {R_grid, cumulative_trapezoid(std::span<const cplx>(f), h)};
}

PerfectClock perfect_clock(double M, double P, const Grid1D& R_grid, double hbar) {
  if (!(M > 0.0) || !(hbar > 0.0)) throw DomainError("perfect_clock: M and hbar must be positive");
  if (!(P > 0.0)) throw DomainError("perfect_clock: P must be positive for an increasing clock reading");
  const auto R = R_grid.points();
  std::vector<double> t(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) t[i] = M * (R[i] - R.front()) / P;
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi * hbar);
  auto chi = ComplexField1D::sample(R_grid, [&](double q) { return std::polar(amp, P * q / hbar); });
  return {TimeMap(R, std::move(t)), std::move(chi), P / M};
}

}  // namespace emtime::semiclassics
