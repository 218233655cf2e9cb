#include "emtime/dynamics/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "../stationary/dirichlet1d.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::dynamics {

WavefunctionTrajectory conditional_from_composite(const ComplexField2D& Psi, const semiclassics::WKBState& wkb,
                                                  const TimeMap& tmap, const ConditionalOptions& opts) {
  const auto& g = Psi.grid();
  if (!(g.R() == wkb.R_grid)) throw ShapeError("conditional_from_composite: Ψ and the WKB clock use different R grids");
  std::size_t lo = 0, hi = g.nR() - 1;
  if (opts.window) {
    const auto [a, b] = *opts.window;
    if (!(b > a)) throw DomainError("conditional_from_composite: empty window");
    while (lo < g.nR() && g.R()[lo] < a) ++lo;
    while (hi > 0 && g.R()[hi] > b) --hi;
    if (lo >= hi) throw WindowError("conditional_from_composite: window holds fewer than two R nodes");
  }
  const auto q = semiclassics::qenviron_residual(wkb);
  const double qmax = *std::max_element(q.begin() + static_cast<std::ptrdiff_t>(lo),
                                        q.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  if (qmax > opts.qenviron_bound)
    throw DomainError("conditional_from_composite: WKB clock invalid in the window (qenviron " +
                      std::to_string(qmax) + " above bound " + std::to_string(opts.qenviron_bound) + ")");

  const auto chi = wkb.chi();
  WavefunctionTrajectory out;
  for (std::size_t iR = lo; iR <= hi; ++iR) {
    auto slice = Psi.slice(iR);
    slice *= 1.0 / chi[iR];
    out.t.push_back(tmap.t_at(g.R()[iR]));
    out.norms.push_back(norm(slice));
    out.psi.push_back(std::move(slice));
  }
  return out;
}

namespace {

struct Weights3 {
  double a, b, c;  // coefficients of f[k−1], f[k], f[k+1]
};

Weights3 first_central(double h1, double h2) {
  return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}

Weights3 second_central(double h1, double h2) {
  return {2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))};
}

using Slices = std::vector<std::vector<cplx>>;

std::vector<cplx> combine(const Slices& f, std::size_t i0, std::size_t i1, std::size_t i2, double a, double b,
                          double c) {
  std::vector<cplx> out(f[i0].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * f[i0][i] + b * f[i1][i] + c * f[i2][i];
  return out;
}

/// ∂_t at slice k: central inside, one-sided three-point at the ends.
std::vector<cplx> time_derivative(const Slices& f, const std::vector<double>& t, std::size_t k) {
  const std::size_t N = t.size();
  if (k == 0) {
    const double h1 = t[1] - t[0], h2 = t[2] - t[1];
    return combine(f, 0, 1, 2, -(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2)));
  }
  if (k == N - 1) {
    const double h2 = t[N - 1] - t[N - 2], h1 = t[N - 2] - t[N - 3];
    return combine(f, N - 1, N - 2, N - 3, (2.0 * h2 + h1) / (h2 * (h1 + h2)), -(h1 + h2) / (h1 * h2),
                   h2 / (h1 * (h1 + h2)));
  }
  const auto w = first_central(t[k] - t[k - 1], t[k + 1] - t[k]);
  return combine(f, k - 1, k, k + 1, w.a, w.b, w.c);
}

cplx dot(const std::vector<double>& w, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::conj(a[i]) * b[i];
  return s;
}

double sqnorm(const std::vector<double>& w, const std::vector<cplx>& a) { return dot(w, a, a).real(); }

}  // namespace

ConditionalResidual tdse_residual_of_conditional(const WavefunctionTrajectory& traj, const SystemPart& sys,
                                                 const Interaction& V_I, double M, double v,
                                                 const ResidualOptions& opts) {
  sys.validate();
  const std::size_t N = traj.t.size();
  if (N < 3 || traj.psi.size() != N) throw ShapeError("tdse_residual_of_conditional: need at least 3 time slices");
  if (!(M > 0.0) || !(v > 0.0)) throw DomainError("tdse_residual_of_conditional: M and v must be positive");
  for (std::size_t k = 1; k < N; ++k)
    if (!(traj.t[k] > traj.t[k - 1])) throw DomainError("tdse_residual_of_conditional: times must increase strictly");
  const auto& g = sys.x_grid;
  const std::size_t nx = g.size();
  for (const auto& p : traj.psi)
    if (!(p.grid() == g)) throw ShapeError("tdse_residual_of_conditional: slice grid differs from the system grid");

  const double hbar = sys.hbar;
  const auto w = stationary::detail::trapezoid_weights(g);
  const auto Vs = tabulate(sys.V_sys, g);
  const double c = -hbar * hbar / (2.0 * sys.m * g.spacing() * g.spacing());
  Slices psi(N);
  for (std::size_t k = 0; k < N; ++k) psi[k].assign(traj.psi[k].values().begin(), traj.psi[k].values().end());

  ConditionalResidual out;
  std::vector<cplx> U(N);
  double sum_psi = 0.0, sum_r = 0.0, sum_hs = 0.0, sum_vi = 0.0, sum_dt = 0.0, sum_us = 0.0;
  std::vector<cplx> Hpsi(nx), Vpsi(nx);
  for (std::size_t k = 0; k < N; ++k) {
    stationary::detail::apply_dirichlet_1d(psi[k], Hpsi, Vs, c, opts.order);
    for (std::size_t i = 0; i < nx; ++i) Vpsi[i] = (V_I ? V_I(g[i], traj.t[k]) : 0.0) * psi[k][i];
    Vpsi.front() = Vpsi.back() = 0.0;
    const auto dpsi = time_derivative(psi, traj.t, k);
    std::vector<cplx> r(nx);
    for (std::size_t i = 0; i < nx; ++i) r[i] = Hpsi[i] + Vpsi[i] - cplx(0.0, hbar) * dpsi[i];
    const double pp = sqnorm(w, psi[k]);
    if (!(pp > 0.0)) throw DegenerateInputError("tdse_residual_of_conditional: zero slice at t = " +
                                                std::to_string(traj.t[k]));
    U[k] = dot(w, psi[k], r) / pp;
    if (k == 0 || k == N - 1) continue;
    for (std::size_t i = 0; i < nx; ++i) r[i] -= U[k] * psi[k][i];
    const double rr = sqnorm(w, r);
    out.t.push_back(traj.t[k]);
    out.U_S.push_back(U[k]);
    out.slice_residual.push_back(std::sqrt(rr / pp));
    sum_psi += pp;
    sum_r += rr;
    sum_hs += sqnorm(w, Hpsi);
    sum_vi += sqnorm(w, Vpsi);
    sum_dt += hbar * hbar * sqnorm(w, dpsi);
    sum_us += std::norm(U[k]) * pp;
  }
  out.residual = std::sqrt(sum_r / sum_psi);
  out.system_term = std::sqrt(sum_hs / sum_psi);
  out.interaction_term = std::sqrt(sum_vi / sum_psi);
  out.time_term = std::sqrt(sum_dt / sum_psi);
  out.U_S_term = std::sqrt(sum_us / sum_psi);

  // ψ̃ = ψ·exp(−(i/ħ)∫U_S dt) satisfies (H_S + V_I − iħ∂_t)ψ̃ = 0 when ψ solves the U_S form.
  Slices tilde(N);
  cplx phase_int = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    if (k > 0) phase_int += 0.5 * (traj.t[k] - traj.t[k - 1]) * (U[k] + U[k - 1]);
    const cplx f = std::exp(cplx(0.0, -1.0 / hbar) * phase_int);
    tilde[k].resize(nx);
    for (std::size_t i = 0; i < nx; ++i) tilde[k][i] = psi[k][i] * f;
  }
  const double pref = hbar * hbar / (2.0 * M * v * v);
  double sum_neg = 0.0, sum_ret = 0.0;
  for (std::size_t k = 1; k + 1 < N; ++k) {
    const double h1 = traj.t[k] - traj.t[k - 1], h2 = traj.t[k + 1] - traj.t[k];
    const auto d1 = first_central(h1, h2), d2 = second_central(h1, h2);
    const auto first = combine(tilde, k - 1, k, k + 1, d1.a, d1.b, d1.c);
    const auto second = combine(tilde, k - 1, k, k + 1, d2.a, d2.b, d2.c);
    sum_neg += pref * pref * sqnorm(w, second);
    sum_ret += hbar * hbar * sqnorm(w, first);
  }
  out.neglected_term = std::sqrt(sum_neg / sum_psi);
  out.retained_term = std::sqrt(sum_ret / sum_psi);
  out.rho = sum_ret > 0.0 ? std::sqrt(sum_neg / sum_ret) : 0.0;
  return out;
}

}  // namespace emtime::dynamics
