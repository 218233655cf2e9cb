#include <cmath>
#include <numbers>

#include "doctest.h"
#include "emtime/classical/clock.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/fit.hpp"
#include "emtime/core/stencil.hpp"
#include "emtime/semiclassics/quantum_time.hpp"
#include "emtime/semiclassics/wkb.hpp"

using namespace emtime;
using namespace emtime::semiclassics;
using classical::ClockModel;

namespace {

ClockModel harmonic_clock(double E_c, double K = 1.0, double M = 1.0, double R0 = -1.0, double R1 = 1.0,
                          std::size_t n = 801) {
  return ClockModel{Harmonic{K, 0.0}, M, E_c, Grid1D(R0, R1, n)};
}

}  // namespace

TEST_CASE("wkb_environment: free clock is a plane wave") {
  const double M = 2.0, E = 9.0, P = std::sqrt(2.0 * M * E);
  const auto w = wkb_environment(ClockModel{Constant{0.0}, M, E, Grid1D(-3, 5, 65)});
  for (std::size_t i = 0; i < w.W.size(); ++i) {
    CHECK(w.W[i] == doctest::Approx(P * (w.R_grid[i] + 3.0)).epsilon(1e-13));
    CHECK(w.A[i] == doctest::Approx(1.0 / std::sqrt(P)).epsilon(1e-15));
  }
  const auto chi = w.chi();
  CHECK(std::abs(chi[10] - std::polar(1.0 / std::sqrt(P), w.W[10])) < 1e-15);
  for (double r : qenviron_residual(w)) CHECK(r == 0.0);
}

TEST_CASE("wkb_environment: linear potential matches the antiderivative") {
  const double M = 1.5, F = 0.8, E = 2.0;
  const Grid1D g(-1.0, 4.0, 4001);
  const auto w = wkb_environment(ClockModel{Linear{-F}, M, E, g});
  auto W_exact = [&](double R) { return std::sqrt(2.0 * M) * (2.0 / 3.0) * std::pow(E + F * R, 1.5) / F; };
  for (std::size_t i = 0; i < g.size(); i += 100)
    CHECK(std::abs(w.W[i] - (W_exact(g[i]) - W_exact(g[0]))) < 1e-6);
}

TEST_CASE("wkb_environment: finite-difference momentum converges at second order") {
  auto err = [](std::size_t n) {
    const auto w = wkb_environment(harmonic_clock(2.0, 1.0, 1.0, -1.0, 1.0, n));
    const auto dW = first_derivative(std::span<const double>(w.W), w.R_grid.spacing());
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) e = std::max(e, std::abs(dW[i] - w.p[i]));
    return e;
  };
  const double e1 = err(101), e2 = err(201);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK_THROWS_AS(wkb_environment(harmonic_clock(0.2)), TurningPointError);
}

TEST_CASE("qenviron_residual: harmonic clock") {
  SUBCASE("matches hbar M K R / p^3") {
    const auto w = wkb_environment(harmonic_clock(3.0));
    const auto r = qenviron_residual(w);
    for (std::size_t i = 1; i + 1 < r.size(); i += 50) {
      const double R = w.R_grid[i];
      const double p = std::sqrt(2.0 * (3.0 - 0.5 * R * R));
      CHECK(std::abs(r[i] - std::abs(R) / (p * p * p)) < 1e-5);
    }
  }
  SUBCASE("fixed-R energy scan follows the p^-3 law") {
    // |V′| is fixed at fixed R while p ∝ E_c^{1/2}, so the ratio falls as E_c^{-3/2}.
    std::vector<double> E, ratio;
    for (double Ec : {10.0, 30.0, 100.0, 300.0, 1000.0}) {
      const auto w = wkb_environment(harmonic_clock(Ec));
      E.push_back(Ec);
      ratio.push_back(qenviron_residual(w)[w.R_grid.nearest(0.5)]);
    }
    CHECK(strictly_decreasing(ratio));
    CHECK(loglog_slope(E, ratio) == doctest::Approx(-1.5).epsilon(0.1 / 1.5));
  }
  SUBCASE("dimensionless under a change of length unit") {
    const double a = 3.7;
    const auto w1 = wkb_environment(harmonic_clock(2.0, 1.0, 1.0, -1.0, 1.0, 201));
    const auto w2 = wkb_environment(ClockModel{Harmonic{1.0 / (a * a), 0.0}, 1.0 / (a * a), 2.0, Grid1D(-a, a, 201)});
    const auto r1 = qenviron_residual(w1), r2 = qenviron_residual(w2);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r2[i] == doctest::Approx(r1[i]).epsilon(1e-10));
  }
}

TEST_CASE("quantum_time: analytic wavefunctions") {
  SUBCASE("plane wave gives M R / P") {
    const double M = 3.0, P = 1.7;
    const Grid1D g(0.5, 6.0, 221);
    const auto chi = ComplexField1D::sample(g, [&](double R) { return std::polar(1.0, P * R); });
    const auto tau = quantum_time(chi, M);
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double t = M * (g[i] - g[0]) / P;
      CHECK(std::abs(tau.tau[i] - t) < 1e-10 * t);
    }
  }
  SUBCASE("real Gaussian gives an imaginary logarithm") {
    const Grid1D g(1.0, 2.0, 2001);
    const auto chi = ComplexField1D::sample(g, [](double R) { return std::exp(-0.5 * R * R); });
    const auto tau = quantum_time(chi, 1.0);
    for (const cplx& t : tau.tau) CHECK(t.real() == 0.0);
    for (std::size_t i = 0; i < g.size(); i += 250) CHECK(std::abs(tau.tau[i] - cplx(0.0, -std::log(g[i]))) < 1e-6);
    CHECK(std::abs(tau.tau.back() - cplx(0.0, -std::log(2.0))) < 1e-6);
  }
  SUBCASE("stationary points and nodes are reported") {
    const Grid1D g(-1.0, 1.0, 41);
    try {
      quantum_time(ComplexField1D::sample(g, [](double R) { return std::exp(-0.5 * R * R); }), 1.0);
      FAIL("expected StationaryPointError");
    } catch (const StationaryPointError& e) {
      REQUIRE(e.where().size() == 1);
      CHECK(std::abs(e.where()[0]) < 1e-12);
    }
    CHECK_THROWS_AS(quantum_time(ComplexField1D::sample(g, [](double R) { return R; }), 1.0), NodeError);
  }
}

TEST_CASE("quantum_time: WKB clock becomes real as the clock energy grows") {
  std::vector<double> frac;
  for (double Ec : {1.0, 3.0, 10.0, 30.0, 100.0}) {
    const auto w = wkb_environment(harmonic_clock(Ec));
    frac.push_back(quantum_time(w.chi(), w.M).imaginary_fraction());
  }
  CHECK(strictly_decreasing(frac));
  CHECK(frac.back() < 1e-2 * frac.front());
}

TEST_CASE("quantum_time: classical limit reproduces the clock time") {
  const auto clock = harmonic_clock(200.0, 1.0, 1.0, -1.0, 1.0, 2001);
  const auto w = wkb_environment(clock);
  const auto q = qenviron_residual(w);
  REQUIRE(*std::max_element(q.begin(), q.end()) < 1e-3);
  const auto tau = quantum_time(w.chi(), w.M);
  const auto t = classical::clock_time_map(clock);
  for (std::size_t i = 1; i < tau.tau.size(); ++i)
    CHECK(std::abs(tau.tau[i].real() - t.t()[i]) < 1e-2 * t.t()[i]);
  CHECK_NOTHROW(tau.real_part());
}

TEST_CASE("polar_time") {
  SUBCASE("constant amplitude gives the real classical time") {
    const auto clock = harmonic_clock(2.0, 1.0, 1.0, -1.0, 1.0, 2001);
    const auto w = wkb_environment(clock);
    const std::vector<double> A(w.A.size(), 0.3);
    const auto tau = polar_time(w.R_grid, A, w.W, w.M);
    const auto t = classical::clock_time_map(clock);
    for (std::size_t i = 0; i < tau.tau.size(); ++i) {
      CHECK(std::abs(tau.tau[i].imag()) < 1e-14);
      CHECK(std::abs(tau.tau[i].real() - t.t()[i]) < 1e-6);
    }
  }
  SUBCASE("agrees with quantum_time on the same WKB data") {
    const auto w = wkb_environment(harmonic_clock(2.0));
    const auto a = polar_time(w.R_grid, w.A, w.W, w.M, w.hbar);
    const auto b = quantum_time(w.chi(), w.M);
    for (std::size_t i = 0; i < a.tau.size(); ++i) CHECK(std::abs(a.tau[i] - b.tau[i]) < 1e-8);
  }
  SUBCASE("imaginary part matches the first-order expansion") {
    // 1/(p − iħ(ln A)′) ≈ (1/p)(1 + iħ(ln A)′/p), so Im τ ≈ M ∫ ħ A′/(A p²).
    // The integrand is odd in R, so integrate over [−1, 0] only.
    const auto w = wkb_environment(harmonic_clock(5.0));
    const std::size_t mid = w.R_grid.nearest(0.0);
    const auto tau = polar_time(w.R_grid, w.A, w.W, w.M, w.hbar);
    const double h = w.R_grid.spacing();
    double lead = 0.0;
    for (std::size_t i = 1; i <= mid; ++i) {
      auto f = [&](std::size_t j) {
        const double R = w.R_grid[j];
        const double p = w.p[j];
        const double dlnA = 0.5 * w.M * R / (p * p);  // A = p^{-1/2}, p′ = −MKR/p
        return w.M * w.hbar * dlnA / (p * p);
      };
      lead += 0.5 * h * (f(i - 1) + f(i));
    }
    const double im = tau.tau[mid].imag();
    REQUIRE(lead != 0.0);
    CHECK(im / lead > 0.5);
    CHECK(im / lead < 2.0);
  }
  CHECK_THROWS_AS(polar_time(Grid1D(0, 1, 5), {1, 1, 0, 1, 1}, {0, 1, 2, 3, 4}, 1.0), NodeError);
  CHECK_THROWS_AS(polar_time(Grid1D(0, 1, 5), {1, 1, 1}, {0, 1, 2, 3, 4}, 1.0), ShapeError);
}

TEST_CASE("perfect_clock") {
  const auto pc = perfect_clock(1.0, 2.0, Grid1D(0.0, 8.0, 81));
  CHECK(pc.time.t_at(4.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(pc.v == 2.0);
  for (double t : {0.5, 1.25, 3.0}) CHECK(pc.time.R_at(t) == doctest::Approx(pc.v * t).epsilon(1e-12));
  CHECK(std::abs(pc.chi[0]) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  const auto tau = quantum_time(pc.chi, 1.0);
  for (std::size_t i = 1; i < tau.tau.size(); ++i) {
    CHECK(std::abs(tau.tau[i].imag()) < 1e-10 * pc.time.t()[i]);
    CHECK(std::abs(tau.tau[i].real() - pc.time.t()[i]) < 1e-10 * pc.time.t()[i]);
  }
  CHECK_THROWS_AS(perfect_clock(1.0, 0.0, Grid1D(0.0, 1.0, 5)), DomainError);
}
