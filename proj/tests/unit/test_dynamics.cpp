#include <cmath>
#include <numbers>

#include "doctest.h"
#include "emtime/classical/clock.hpp"
#include "emtime/core/channel_basis.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/fit.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/dynamics/amplitudes.hpp"
#include "emtime/dynamics/complex_time.hpp"
#include "emtime/dynamics/conditional.hpp"
#include "emtime/dynamics/emergence_scan.hpp"
#include "emtime/dynamics/tdse.hpp"
#include "emtime/semiclassics/wkb.hpp"
#include "emtime/stationary/factorization.hpp"

using namespace emtime;
using namespace emtime::dynamics;

namespace {

SystemPart oscillator(std::size_t n = 201, double L = 8.0) {
  return SystemPart{Harmonic{1.0, 0.0}, 1.0, 1.0, Grid1D(-L, L, n)};
}

double field_distance(const ComplexField1D& a, const ComplexField1D& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

cplx matrix_element(const ComplexField1D& a, const ComplexField1D& b, const std::function<double(double)>& f) {
  auto fb = b;
  for (std::size_t i = 0; i < fb.size(); ++i) fb[i] *= f(b.grid()[i]);
  return inner_product(a, fb);
}

/// Separable composite φ0(x)·exp(iPR) carrying total energy E, on a free clock.
struct SeparableComposite {
  SystemPart sys = oscillator(161, 8.0);
  ChannelBasis basis = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 2, StencilOrder::fourth);
  double M = 50.0;
  double E = 100.0;
  Grid1D R_grid{0.0, 10.0, 2001};
  ComplexField2D Psi{Grid2D(sys.x_grid, R_grid)};

  SeparableComposite() {
    const double P = std::sqrt(2.0 * M * (E - basis.energies()[0]));
    for (std::size_t iR = 0; iR < R_grid.size(); ++iR)
      for (std::size_t ix = 0; ix < sys.x_grid.size(); ++ix)
        Psi(ix, iR) = basis.state(0)[ix] * std::polar(1.0, P * R_grid[iR]);
  }
  classical::ClockModel clock() const { return {Constant{0.0}, M, E, R_grid}; }
};

}  // namespace

TEST_CASE("propagate_tdse: free Gaussian packet spreads by the analytic law") {
  const double sigma = 1.0;
  const SystemPart sys{Constant{0.0}, 1.0, 1.0, Grid1D(-25.0, 25.0, 2501)};
  const auto psi0 = ComplexField1D::sample(sys.x_grid, [&](double x) {
    return std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25) * std::exp(-x * x / (4.0 * sigma * sigma));
  });
  const auto traj = propagate_tdse(sys, {}, psi0, uniform_times(0.0, 4.0, 1600), {.store_every = 400});
  REQUIRE(traj.t.size() == 5);
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const auto& psi = traj.psi[k];
    double x2 = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) x2 += std::norm(psi[i]) * std::pow(sys.x_grid[i], 2);
    x2 *= sys.x_grid.spacing();
    const double s = traj.t[k] / (2.0 * sigma * sigma);
    const double expected = sigma * sigma * (1.0 + s * s);
    CHECK(std::abs(x2 - expected) < 1e-4 * expected);
  }
}

TEST_CASE("propagate_tdse: unitarity, stationary states and step convergence") {
  const auto sys = oscillator();
  const auto basis = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 2, StencilOrder::second);

  SUBCASE("eigenstate keeps unit overlap") {
    const auto traj = propagate_tdse(sys, {}, basis.state(0), uniform_times(0.0, 20.0, 2000));
    for (const auto& psi : traj.psi) CHECK(std::abs(std::abs(inner_product(basis.state(0), psi)) - 1.0) < 1e-8);
  }
  SUBCASE("norm drift stays below 1e-10 per thousand steps under driving") {
    const Interaction V = [](double x, double t) { return 0.4 * x * std::sin(1.3 * t); };
    const auto traj = propagate_tdse(sys, V, basis.state(0), uniform_times(0.0, 30.0, 3000));
    for (double n : traj.norms) CHECK(std::abs(n - 1.0) < 3e-10);
  }
  SUBCASE("halving the step quarters the error") {
    const Interaction V = [](double x, double t) { return 0.5 * x * std::sin(2.0 * t); };
    auto final_state = [&](std::size_t n) {
      return propagate_tdse(sys, V, basis.state(0), uniform_times(0.0, 2.0, n)).psi.back();
    };
    const auto coarse = final_state(100), fine = final_state(200), ref = final_state(800);
    const double ratio = field_distance(coarse, ref) / field_distance(fine, ref);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
  SUBCASE("preconditions") {
    auto bad = basis.state(0);
    bad *= 2.0;
    CHECK_THROWS_AS(propagate_tdse(sys, {}, bad, uniform_times(0.0, 1.0, 10)), DomainError);
    CHECK_THROWS_AS(propagate_tdse(sys, {}, basis.state(0), {0.0, 1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(propagate_tdse(oscillator(101), {}, basis.state(0), {0.0, 1.0}), ShapeError);
  }
}

TEST_CASE("propagate_amplitudes") {
  const auto sys = oscillator();
  const auto basis = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 4, StencilOrder::second);

  SUBCASE("no interaction leaves the amplitudes unchanged") {
    const std::vector<cplx> a0{cplx(0.6, 0.0), cplx(0.0, 0.8), 0.0, 0.0};
    const auto set = propagate_amplitudes(basis, {}, a0, uniform_times(0.0, 5.0, 50));
    for (const auto& a : set.a)
      for (std::size_t m = 0; m < 4; ++m) CHECK(a[m] == a0[m]);
  }
  SUBCASE("degenerate pair follows the Rabi law") {
    const ChannelBasis pair(sys.x_grid, {basis.state(0), basis.state(1)}, {0.5, 0.5});
    const double x01 = matrix_element(basis.state(0), basis.state(1), [](double x) { return x; }).real();
    const double V = 0.2;
    const Interaction VI = [&](double x, double) { return V * x / x01; };
    const auto set = propagate_amplitudes(pair, VI, {1.0, 0.0}, uniform_times(0.0, 20.0, 2000));
    for (std::size_t k = 0; k < set.t.size(); k += 50)
      CHECK(std::abs(std::norm(set.a[k][1]) - std::pow(std::sin(V * set.t[k]), 2)) < 1e-6);
  }
  SUBCASE("Hermitian coupling conserves population") {
    const Interaction VI = [](double x, double t) { return 0.3 * x * std::exp(-std::pow(t - 5.0, 2)) * std::cos(t); };
    const auto set = propagate_amplitudes(basis, VI, {1.0, 0.0, 0.0, 0.0}, uniform_times(0.0, 10.0, 1000));
    CHECK(set.population_drift < 1e-8);
    CHECK(std::norm(set.a.back()[1]) > 1e-4);
  }
  SUBCASE("too large a step is reported") {
    const Interaction VI = [](double x, double) { return 50.0 * x; };
    CHECK_THROWS_AS(propagate_amplitudes(basis, VI, {1.0, 0.0, 0.0, 0.0}, {0.0, 1.0, 2.0}), StabilityError);
  }
  CHECK_THROWS_AS(propagate_amplitudes(basis, {}, {1.0, 1.0, 0.0, 0.0}, {0.0, 1.0}), DomainError);
}

TEST_CASE("compare_amplitudes_vs_grid") {
  const auto sys = oscillator();
  const auto basis = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 3, StencilOrder::second);

  SUBCASE("no interaction") {
    auto psi0 = basis.state(0);
    for (std::size_t i = 0; i < psi0.size(); ++i) psi0[i] = (basis.state(0)[i] + cplx(0.0, 1.0) * basis.state(1)[i]);
    psi0 = normalize(psi0);
    const auto cmp = compare_amplitudes_vs_grid(sys, basis, {}, psi0, uniform_times(0.0, 1.0, 10000));
    CHECK(cmp.defect < 1e-12);
    CHECK(cmp.max_deviation < 1e-8);
  }
  SUBCASE("weak pulse: the two routes agree and truncation is visible") {
    const Interaction VI = [](double x, double t) { return 0.02 * x * std::exp(-0.5 * std::pow(t - 5.0, 2)); };
    const auto times = uniform_times(0.0, 10.0, 4000);
    const auto two = compare_amplitudes_vs_grid(sys, basis.truncated(2), VI, basis.state(0), times);
    const auto three = compare_amplitudes_vs_grid(sys, basis, VI, basis.state(0), times);
    CHECK(two.defect < 1e-6);
    CHECK(two.max_deviation < 1e-3);
    CHECK(two.max_deviation > 10.0 * three.max_deviation);
  }
  SUBCASE("state outside the span") {
    const auto full = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 4, StencilOrder::second);
    CHECK_THROWS_AS(compare_amplitudes_vs_grid(sys, basis, {}, full.state(3), {0.0, 0.1}), DomainError);
  }
}

TEST_CASE("conditional_from_composite") {
  const SeparableComposite sc;
  const auto wkb = semiclassics::wkb_environment(sc.clock());
  const auto tmap = classical::clock_time_map(sc.clock());
  const auto traj = conditional_from_composite(sc.Psi, wkb, tmap);
  REQUIRE(traj.t.size() == sc.R_grid.size());

  SUBCASE("separable composite carries the system phase") {
    // With the clock at the total energy, ψ_cond = φ0·exp(−iε0 t(1 + O(ε0/E))).
    std::vector<double> phase;
    double prev = 0.0, offset = 0.0;
    for (const auto& psi : traj.psi) {
      const cplx ov = inner_product(sc.basis.state(0), psi);
      double ph = std::arg(ov);
      if (!phase.empty()) {
        while (ph + offset - prev > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
        while (ph + offset - prev < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
      }
      prev = ph + offset;
      phase.push_back(prev);
    }
    double st = 0.0, sp = 0.0, stt = 0.0, stp = 0.0;
    const auto n = static_cast<double>(phase.size());
    for (std::size_t k = 0; k < phase.size(); ++k) {
      st += traj.t[k];
      sp += phase[k];
      stt += traj.t[k] * traj.t[k];
      stp += traj.t[k] * phase[k];
    }
    const double slope = (n * stp - st * sp) / (n * stt - st * st);
    CHECK(slope == doctest::Approx(-sc.basis.energies()[0]).epsilon(0.02));
  }
  SUBCASE("perfect clock matches the prescribed factorization") {
    CompositeSpec spec;
    spec.M = sc.M;
    const auto fs = stationary::factorize_prescribed(sc.Psi, wkb.chi(), spec);
    for (std::size_t iR = 0; iR < sc.R_grid.size(); iR += 100)
      CHECK(field_distance(fs.psi.slice(iR), traj.psi[iR]) < 1e-14);
  }
  SUBCASE("slice norms flatten for energetic harmonic clocks") {
    const auto xb = system_eigenstates(Harmonic{1.0, 0.0}, 1.0, 1.0, Grid1D(-6, 6, 61), 1, StencilOrder::fourth);
    std::vector<double> spread;
    for (double Ec : {10.0, 100.0, 1000.0}) {
      const classical::ClockModel clock{Harmonic{1.0, 0.0}, 1.0, Ec, Grid1D(-1.0, 1.0, 201)};
      auto inner = clock;
      inner.E_c = Ec - xb.energies()[0];
      const auto chi_true = semiclassics::wkb_environment(inner).chi();
      const auto Psi = ComplexField2D::sample(Grid2D(xb.x_grid(), clock.R_grid), [&](double x, double R) {
        return xb.state(0)[xb.x_grid().nearest(x)] * chi_true[clock.R_grid.nearest(R)];
      });
      const auto tr = conditional_from_composite(Psi, semiclassics::wkb_environment(clock),
                                                 classical::clock_time_map(clock));
      const auto [lo, hi] = std::minmax_element(tr.norms.begin(), tr.norms.end());
      spread.push_back((*hi - *lo) / *hi);
    }
    CHECK(strictly_decreasing(spread));
    CHECK(spread.back() < 1e-2);
  }
  SUBCASE("errors") {
    ConditionalOptions tight;
    tight.qenviron_bound = -1.0;
    CHECK_THROWS_AS(conditional_from_composite(sc.Psi, wkb, tmap, tight), DomainError);
    const auto other = semiclassics::wkb_environment(classical::ClockModel{Constant{0.0}, 1.0, 1.0, Grid1D(0, 10, 11)});
    CHECK_THROWS_AS(conditional_from_composite(sc.Psi, other, tmap), ShapeError);
  }
}

TEST_CASE("tdse_residual_of_conditional") {
  SUBCASE("exact solution: residual falls fourfold when slices double") {
    const auto sys = oscillator(121, 7.0);
    const auto basis = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 2, StencilOrder::fourth);
    auto make = [&](std::size_t n) {
      WavefunctionTrajectory tr;
      for (double t : uniform_times(0.0, 2.0, n)) {
        ComplexField1D psi(sys.x_grid);
        for (std::size_t i = 0; i < psi.size(); ++i)
          psi[i] = (basis.state(0)[i] * std::polar(1.0, -basis.energies()[0] * t) +
                    basis.state(1)[i] * std::polar(1.0, -basis.energies()[1] * t)) /
                   std::sqrt(2.0);
        tr.t.push_back(t);
        tr.norms.push_back(norm(psi));
        tr.psi.push_back(std::move(psi));
      }
      return tdse_residual_of_conditional(tr, sys, {}, 1.0, 1.0);
    };
    const auto a = make(40), b = make(80);
    CHECK(a.residual < 1e-2);
    CHECK(a.residual / b.residual == doctest::Approx(4.0).epsilon(0.1));
  }
  SUBCASE("separable energetic composite: small residual, stationary-phase ratio") {
    const SeparableComposite sc;
    const auto clock = sc.clock();
    const auto traj = conditional_from_composite(sc.Psi, semiclassics::wkb_environment(clock),
                                                 classical::clock_time_map(clock));
    const double v = std::sqrt(2.0 * sc.E / sc.M);
    const auto res = tdse_residual_of_conditional(traj, sc.sys, {}, sc.M, v);
    const double eps0 = sc.basis.energies()[0];
    const double estimate = eps0 / (2.0 * sc.M * v * v);
    CHECK(res.residual < 1e-2);
    CHECK(res.residual <= res.neglected_term);
    CHECK(res.rho > estimate / 3.0);
    CHECK(res.rho < estimate * 3.0);
    CHECK(res.retained_term == doctest::Approx(eps0).epsilon(0.01));
  }
  SUBCASE("too few slices") {
    const auto sys = oscillator(21);
    WavefunctionTrajectory tr{{0.0, 1.0}, {ComplexField1D(sys.x_grid), ComplexField1D(sys.x_grid)}, {0.0, 0.0}};
    CHECK_THROWS_AS(tdse_residual_of_conditional(tr, sys, {}, 1.0, 1.0), ShapeError);
  }
}

TEST_CASE("emergence_scan") {
  QuantumEmergenceSetup s;
  s.R_max = 10.0;
  s.V_int = WindowedPulse{0.05, 5.0, 1.0, Linear{1.0}};
  s.nx = 31;
  s.min_nR = 201;
  const std::vector<double> masses{0.3, 1.0, 3.0, 10.0};

  SUBCASE("neglected-to-retained ratio falls as the inverse clock energy") {
    const auto rep = emergence_scan(s, masses);
    for (const auto& p : rep.points) REQUIRE_MESSAGE(p.ok, p.error);
    CHECK(rep.points.back().Mv2 / rep.points.front().Mv2 >= 30.0);
    CHECK(rep.slope == doctest::Approx(-1.0).epsilon(0.3));
    CHECK(rep.monotone);
    for (const auto& p : rep.points) {
      CHECK(p.channel0_weight > 0.99);
      CHECK(p.v_spread < 1e-12);
    }
  }
  SUBCASE("uncoupled control sits at the discretization floor") {
    s.V_int = ZeroCoupling{};
    const auto rep = emergence_scan(s, masses);
    for (const auto& p : rep.points) {
      REQUIRE_MESSAGE(p.ok, p.error);
      CHECK(p.residual < 1e-8);
      CHECK(p.rho == doctest::Approx(p.rho_estimate).epsilon(0.05));
    }
  }
  CHECK_THROWS_AS(emergence_scan(s, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(emergence_scan(s, {1.0, 2.0, 3.0}), DomainError);
}

TEST_CASE("propagate_complex_time") {
  const auto sys = oscillator(161, 8.0);
  const auto basis = system_eigenstates(sys.V_sys, 1.0, 1.0, sys.x_grid, 2, StencilOrder::second);
  auto psi0 = basis.state(0);
  for (std::size_t i = 0; i < psi0.size(); ++i) psi0[i] = (basis.state(0)[i] + basis.state(1)[i]) / std::sqrt(2.0);
  const Grid1D Rg(0.0, 3.0, 301);
  const PathInteraction VI = [](double x, double R) { return 0.3 * x * std::sin(2.0 * R); };

  SUBCASE("real path reproduces the real-time propagator") {
    semiclassics::ComplexTimeMap path{Rg, {}};
    for (std::size_t i = 0; i < Rg.size(); ++i) path.tau.push_back(Rg[i]);
    const auto a = propagate_complex_time(sys, {}, VI, psi0, path);
    const auto b = propagate_tdse(sys, [&](double x, double t) { return VI(x, t); }, psi0, Rg.points());
    for (std::size_t k = 0; k < a.psi.size(); k += 30) CHECK(field_distance(a.psi[k], b.psi[k]) < 1e-10);
  }
  SUBCASE("imaginary steps relax toward the ground state") {
    semiclassics::ComplexTimeMap path{Rg, {}};
    for (std::size_t i = 0; i < Rg.size(); ++i) path.tau.push_back(cplx(0.0, -Rg[i]));
    const auto tr = propagate_complex_time(sys, {}, {}, psi0, path);
    double prev_overlap = 0.0;
    for (std::size_t k = 1; k < tr.psi.size(); ++k) {
      CHECK(tr.norms[k] < tr.norms[k - 1]);
      const double ov = std::abs(inner_product(basis.state(0), tr.psi[k])) / tr.norms[k];
      CHECK(ov > prev_overlap);
      prev_overlap = ov;
    }
  }
  SUBCASE("small imaginary parts perturb the field linearly") {
    semiclassics::ComplexTimeMap real{Rg, {}};
    for (std::size_t i = 0; i < Rg.size(); ++i) real.tau.push_back(Rg[i]);
    const auto ref = propagate_complex_time(sys, {}, VI, psi0, real).psi.back();
    std::vector<double> eps, dev;
    for (double e : {1e-5, 1e-4, 1e-3}) {
      auto path = real;
      for (std::size_t i = 0; i < Rg.size(); ++i) path.tau[i] += cplx(0.0, e * std::sin(Rg[i]));
      eps.push_back(e);
      dev.push_back(field_distance(propagate_complex_time(sys, {}, VI, psi0, path).psi.back(), ref));
    }
    CHECK(loglog_slope(eps, dev) == doctest::Approx(1.0).epsilon(0.2));
  }
  SUBCASE("growing direction is reported") {
    semiclassics::ComplexTimeMap path{Rg, {}};
    for (std::size_t i = 0; i < Rg.size(); ++i) path.tau.push_back(cplx(0.0, 20.0 * Rg[i]));
    CHECK_THROWS_AS(propagate_complex_time(sys, {}, {}, psi0, path), StabilityError);
  }
  SUBCASE("back-reaction enters with a plus sign") {
    semiclassics::ComplexTimeMap path{Rg, {}};
    for (std::size_t i = 0; i < Rg.size(); ++i) path.tau.push_back(Rg[i]);
    const auto a = propagate_complex_time(sys, {}, {}, basis.state(0), path);
    const auto b = propagate_complex_time(sys, [](double) { return cplx(0.7); }, {}, basis.state(0), path);
    const cplx ratio = inner_product(a.psi.back(), b.psi.back());
    // An eigenstate picks up one Cayley factor per step; U_S = +0.7 raises its energy.
    const double dt = Rg.spacing(), e0 = basis.energies()[0];
    auto cayley = [&](double e) { return (1.0 - cplx(0.0, 0.5 * dt * e)) / (1.0 + cplx(0.0, 0.5 * dt * e)); };
    const cplx expected = std::pow(std::conj(cayley(e0)) * cayley(e0 + 0.7), 300);
    CHECK(std::abs(ratio - expected) < 1e-9);
  }
}
