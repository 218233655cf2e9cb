#include "emtime/dynamics/amplitudes.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>

#include "../stationary/dirichlet1d.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"

namespace emtime::dynamics {

namespace {

double population(const std::vector<cplx>& a) {
  double s = 0.0;
  for (const cplx& z : a) s += std::norm(z);
  return s;
}

/// Right-hand side of the interaction-picture equations with a one-entry cache of V_mn.
class AmplitudeRhs {
 public:
  AmplitudeRhs(const ChannelBasis& basis, const Interaction& V_I, double hbar)
      : basis_(basis), V_I_(V_I), hbar_(hbar), w_(stationary::detail::trapezoid_weights(basis.x_grid())),
        V_(basis.size() * basis.size(), 0.0) {}

  void operator()(const std::vector<cplx>& a, std::vector<cplx>& dadt, double t) {
    const std::size_t K = basis_.size();
    dadt.assign(K, 0.0);
    if (!V_I_) return;
    matrix(t);
    const auto& eps = basis_.energies();
    for (std::size_t m = 0; m < K; ++m) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        acc += V_[m * K + k] * a[k] * std::polar(1.0, (eps[m] - eps[k]) * t / hbar_);
      dadt[m] = acc / cplx(0.0, hbar_);
    }
  }

 private:
  void matrix(double t) {
    if (cached_ && t == t_cached_) return;
    const auto& g = basis_.x_grid();
    const std::size_t K = basis_.size(), nx = g.size();
    std::vector<double> v(nx);
    for (std::size_t i = 0; i < nx; ++i) v[i] = w_[i] * V_I_(g[i], t);
    for (std::size_t m = 0; m < K; ++m)
      for (std::size_t k = m; k < K; ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < nx; ++i) acc += std::conj(basis_.state(m)[i]) * v[i] * basis_.state(k)[i];
        V_[m * K + k] = acc;
        V_[k * K + m] = std::conj(acc);
      }
    cached_ = true;
    t_cached_ = t;
  }

  const ChannelBasis& basis_;
  const Interaction& V_I_;
  double hbar_;
  std::vector<double> w_;
  std::vector<cplx> V_;
  bool cached_ = false;
  double t_cached_ = 0.0;
};

}  // namespace

AmplitudeSet propagate_amplitudes(const ChannelBasis& basis, const Interaction& V_I, const std::vector<cplx>& a0,
                                  const std::vector<double>& t_grid, const AmplitudeOptions& opts) {
  if (a0.size() != basis.size()) throw ShapeError("propagate_amplitudes: a0 size differs from the basis size");
  if (!(opts.hbar > 0.0)) throw DomainError("propagate_amplitudes: hbar must be positive");
  if (t_grid.size() < 2) throw DomainError("propagate_amplitudes: need at least two times");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw DomainError("propagate_amplitudes: times must increase strictly");
  const double p0 = population(a0);
  if (std::abs(p0 - 1.0) > 1e-8) throw DomainError("propagate_amplitudes: a0 must be normalized");
  const std::size_t sub = opts.substeps == 0 ? 1 : opts.substeps;

  AmplitudeRhs rhs(basis, V_I, opts.hbar);
  boost::numeric::odeint::runge_kutta4<std::vector<cplx>> rk4;
  AmplitudeSet out{{t_grid.front()}, {a0}, basis.energies(), 0.0};
  std::vector<cplx> a = a0;
  for (std::size_t k = 0; k + 1 < t_grid.size(); ++k) {
    const double h = (t_grid[k + 1] - t_grid[k]) / static_cast<double>(sub);
    for (std::size_t s = 0; s < sub; ++s) rk4.do_step(std::ref(rhs), a, t_grid[k] + static_cast<double>(s) * h, h);
    const double drift = std::abs(population(a) - p0);
    out.population_drift = std::max(out.population_drift, drift);
    if (drift > opts.drift_tolerance)
      throw StabilityError("propagate_amplitudes: population drift " + std::to_string(drift) + " at t = " +
                           std::to_string(t_grid[k + 1]) + "; reduce the step");
    out.t.push_back(t_grid[k + 1]);
    out.a.push_back(a);
  }
  return out;
}

AmplitudeComparison compare_amplitudes_vs_grid(const SystemPart& sys, const ChannelBasis& basis,
                                               const Interaction& V_I, const ComplexField1D& psi0,
                                               const std::vector<double>& t_grid, const AmplitudeOptions& amp_opts,
                                               const TdseOptions& tdse_opts) {
  if (!(basis.x_grid() == sys.x_grid)) throw ShapeError("compare_amplitudes_vs_grid: basis and system grids differ");
  if (amp_opts.hbar != sys.hbar) throw DomainError("compare_amplitudes_vs_grid: hbar differs between routes");
  const std::size_t K = basis.size();
  std::vector<cplx> a0(K);
  ComplexField1D rest = psi0;
  for (std::size_t m = 0; m < K; ++m) {
    a0[m] = inner_product(basis.state(m), psi0);
    for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= a0[m] * basis.state(m)[i];
  }
  const double defect = norm(rest);
  if (defect >= 1e-6)
    throw DomainError("compare_amplitudes_vs_grid: ψ0 lies outside the basis span (defect " + std::to_string(defect) +
                      ")");
  // Renormalize the projected amplitudes so both routes start from unit norm.
  const double pa = std::sqrt(population(a0));
  for (cplx& z : a0) z /= pa;

  AmplitudeComparison out;
  out.defect = defect;
  TdseOptions topt = tdse_opts;
  topt.store_every = 1;
  out.grid = propagate_tdse(sys, V_I, psi0, t_grid, topt);
  out.amplitudes = propagate_amplitudes(basis, V_I, a0, t_grid, amp_opts);
  const auto& eps = basis.energies();
  for (std::size_t k = 0; k < out.grid.t.size(); ++k) {
    const double t = out.grid.t[k];
    double dev = 0.0;
    for (std::size_t m = 0; m < K; ++m) {
      const cplx proj = std::polar(1.0, eps[m] * t / sys.hbar) * inner_product(basis.state(m), out.grid.psi[k]);
      dev = std::max(dev, std::abs(out.amplitudes.a[k][m] - proj));
    }
    out.deviation.push_back(dev);
    out.max_deviation = std::max(out.max_deviation, dev);
  }
  return out;
}

}  // namespace emtime::dynamics
