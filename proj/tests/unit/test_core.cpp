#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "emtime/core/channel_basis.hpp"
#include "emtime/core/composite.hpp"
#include "emtime/core/errors.hpp"
#include "emtime/core/quadrature.hpp"
#include "emtime/core/stencil.hpp"
#include "emtime/kernels/kernels.hpp"

using namespace emtime;
using std::numbers::pi;

namespace {

ComplexField1D gaussian(const Grid1D& g, double sigma = 1.0, double center = 0.0) {
  const double c = std::pow(pi * sigma * sigma, -0.25);
  return ComplexField1D::sample(g, [&](double q) {
    const double u = (q - center) / sigma;
    return c * std::exp(-0.5 * u * u);
  });
}

}  // namespace

TEST_CASE("grid construction and refinement") {
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 2), ShapeError);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 10), ShapeError);
  const Grid1D g(-1.0, 1.0, 5);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.refined().size() == 9);
  CHECK(g.refined().spacing() == doctest::Approx(0.25));
  CHECK(g.nearest(0.26) == 3);
  CHECK(g.nearest(-7.0) == 0);
  CHECK(g.nearest(7.0) == 4);
  const Grid2D g2(g, Grid1D(0.0, 2.0, 3));
  CHECK(g2.index(1, 2) == 11);
}

TEST_CASE("field invariants") {
  const Grid1D g(0.0, 1.0, 4);
  CHECK_THROWS_AS(ComplexField1D(g, std::vector<cplx>(3)), ShapeError);
  CHECK_THROWS_AS(ComplexField1D(g, {0.0, NAN, 0.0, 0.0}), NumericalError);
  const Grid2D g2(g, Grid1D(0.0, 1.0, 3));
  const auto f = ComplexField2D::sample(g2, [](double x, double R) { return x + 10.0 * R; });
  const auto row = f.slice(2);
  CHECK(row[1].real() == doctest::Approx(1.0 / 3.0 + 10.0));
}

TEST_CASE("potential variants") {
  CHECK(eval(Potential1D{Harmonic{2.0, 0.0}}, 3.0) == 9.0);
  CHECK(eval(Coupling2D{ZeroCoupling{}}, 1.7, -4.0) == 0.0);
  CHECK(eval(Coupling2D{Bilinear{0.3}}, 1.5, -2.0) == 0.3 * 1.5 * -2.0);
  CHECK(eval(Potential1D{Linear{-2.0}}, 1.5) == -3.0);
  CHECK(eval(Potential1D{Constant{4.0}}, 1e9) == 4.0);
  CHECK(eval(Potential1D{GaussianWell{2.0, 0.5, 1.0}}, 1.0) == -2.0);

  SUBCASE("tabulated cubic interpolation of sin on [0, pi]") {
    const Grid1D g(0.0, pi, 201);
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::sin(g[i]);
    const Potential1D tab = Tabulated(g, s);
    CHECK(std::abs(eval(tab, pi / 2) - 1.0) < 1e-6);
    CHECK(std::abs(derivative(tab, 1.0) - std::cos(1.0)) < 1e-4);
    CHECK_THROWS_AS(eval(tab, -0.1), DomainError);
    CHECK_THROWS_AS(eval(tab, pi + 0.1), DomainError);
    CHECK_THROWS_AS(Tabulated(Grid1D(0.0, 1.0, 3), {0.0, 1.0, 2.0}), ShapeError);
  }

  SUBCASE("analytic derivatives match central differences") {
    const std::vector<Potential1D> vs{Harmonic{1.3, 0.2}, Linear{0.7}, GaussianWell{1.1, 0.6, -0.3}};
    const double h = 1e-5;
    for (const auto& v : vs) {
      for (double q : {-1.0, 0.1, 0.9}) {
        CHECK(derivative(v, q) == doctest::Approx((eval(v, q + h) - eval(v, q - h)) / (2 * h)).epsilon(1e-7));
        CHECK(second_derivative(v, q) ==
              doctest::Approx((derivative(v, q + h) - derivative(v, q - h)) / (2 * h)).epsilon(1e-6));
      }
    }
    const std::vector<Coupling2D> cs{Bilinear{0.4}, Separable{Harmonic{1.0, 0.0}, Linear{2.0}},
                                     WindowedPulse{0.3, 1.0, 0.5, Linear{1.0}}};
    for (const auto& c : cs) {
      const double x = 0.3, R = 1.2;
      CHECK(derivative_x(c, x, R) == doctest::Approx((eval(c, x + h, R) - eval(c, x - h, R)) / (2 * h)).epsilon(1e-7));
      CHECK(derivative_R(c, x, R) == doctest::Approx((eval(c, x, R + h) - eval(c, x, R - h)) / (2 * h)).epsilon(1e-7));
    }
  }

  SUBCASE("evaluation is bit-reproducible") {
    const Coupling2D c = WindowedPulse{0.37, 1.1, 0.45, GaussianWell{1.0, 0.3, 0.1}};
    CHECK(eval(c, 0.123, 0.987) == eval(c, 0.123, 0.987));
  }
}

TEST_CASE("composite spec validation") {
  CompositeSpec s;
  CHECK_NOTHROW(s.validate());
  s.M = -1.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.M = 1.0;
  s.E = 1.0;
  s.E_c = 2.0;
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.E_c = 0.5;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("inner product") {
  const Grid1D g(-10.0, 10.0, 2001);
  const auto a = gaussian(g);
  CHECK(std::abs(inner_product(a, a) - 1.0) < 1e-8);
  const auto odd = ComplexField1D::sample(g, [](double q) { return q * std::exp(-q * q / 2); });
  CHECK(std::abs(inner_product(a, odd)) < 1e-10);

  const Grid1D h(0.0, pi, 2001);
  const auto s1 = ComplexField1D::sample(h, [](double q) { return std::sin(q); });
  const auto s2 = ComplexField1D::sample(h, [](double q) { return std::sin(2 * q); });
  CHECK(std::abs(inner_product(s1, s2)) < 1e-8);

  const auto c1 = ComplexField1D::sample(h, [](double q) { return std::polar(1.0 + q, 0.3 * q); });
  const auto c2 = ComplexField1D::sample(h, [](double q) { return std::polar(2.0 - q * q / 10, -q); });
  CHECK(std::abs(inner_product(c1, c2) - std::conj(inner_product(c2, c1))) < 1e-14);

  CHECK_THROWS_AS(inner_product(a, s1), ShapeError);
}

TEST_CASE("trapezoid quadrature converges at second order") {
  // ∫_0^1 e^q dq = e − 1
  auto err = [](std::size_t n) {
    const Grid1D g(0.0, 1.0, n);
    const auto f = ComplexField1D::sample(g, [](double q) { return std::exp(0.5 * q); });
    return std::abs(inner_product(f, f).real() - (std::exp(1.0) - 1.0));
  };
  const double ratio = err(21) / err(41);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));

  const std::vector<double> f{0.0, 1.0, 4.0, 9.0};
  const auto c = cumulative_trapezoid(std::span<const double>(f), 1.0);
  CHECK(c[3] == doctest::Approx(0.5 + 2.5 + 6.5));
  const std::vector<double> q{0.0, 0.5, 2.0, 3.0};
  const auto cn = cumulative_trapezoid(std::span<const double>(f), std::span<const double>(q));
  CHECK(cn[3] == doctest::Approx(0.25 + 3.75 + 6.5));
}

TEST_CASE("second derivative stencil") {
  const Grid1D g(-1.0, 2.0, 31);
  const auto quad = ComplexField1D::sample(g, [](double q) { return q * q; });
  const auto d_quad = second_derivative(quad);
  for (const cplx& v : d_quad.values()) CHECK(std::abs(v - 2.0) < 1e-9);

  const auto flat = ComplexField1D::sample(g, [](double) { return 3.5; });
  const auto d_flat = second_derivative(flat);
  for (const cplx& v : d_flat.values()) CHECK(std::abs(v) < 1e-9);

  auto err = [](std::size_t n) {
    const Grid1D gg(0.0, 3.0, n);
    const auto f = ComplexField1D::sample(gg, [](double q) { return std::sin(q); });
    const auto d = second_derivative(f);
    double e = 0.0;
    for (std::size_t i = 0; i < gg.size(); ++i) e = std::max(e, std::abs(d[i] + std::sin(gg[i])));
    return e;
  };
  CHECK(err(161) / err(321) == doctest::Approx(4.0).epsilon(0.1));

  SUBCASE("fourth-order interior") {
    auto err4 = [](std::size_t n) {
      const Grid1D gg(0.0, 3.0, n);
      std::vector<double> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(gg[i]);
      const auto d = second_derivative<double>(f, gg.spacing(), StencilOrder::fourth);
      double e = 0.0;
      for (std::size_t i = 2; i + 2 < n; ++i) e = std::max(e, std::abs(d[i] + f[i]));
      return e;
    };
    CHECK(err4(41) / err4(81) == doctest::Approx(16.0).epsilon(0.1));
  }

  SUBCASE("first derivative and non-uniform abscissa") {
    const Grid1D gg(0.0, 1.0, 11);
    const auto f = ComplexField1D::sample(gg, [](double q) { return q * q + 3 * q; });
    const auto d = first_derivative(f);
    for (std::size_t i = 0; i < gg.size(); ++i) CHECK(std::abs(d[i] - (2 * gg[i] + 3)) < 1e-12);
    const std::vector<double> q{0.0, 0.1, 0.35, 0.4, 0.9, 1.0};
    std::vector<double> v(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) v[i] = q[i] * q[i] - q[i];
    const auto dn = first_derivative_nonuniform<double>(v, q);
    const auto d2 = second_derivative_nonuniform<double>(v, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
      CHECK(dn[i] == doctest::Approx(2 * q[i] - 1));
      CHECK(d2[i] == doctest::Approx(2.0));
    }
  }
}

TEST_CASE("normalize") {
  const Grid1D g(-10.0, 10.0, 1001);
  auto twice = gaussian(g);
  twice *= 2.0;
  const auto unit = normalize(twice);
  const auto ref = gaussian(g);
  const double n_ref = norm(ref);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(unit[i] - ref[i] / n_ref) < 1e-14);

  const auto again = normalize(unit);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(again[i] - unit[i]) < 1e-12);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::vector<cplx> r(g.size());
  for (auto& z : r) z = {nd(rng), nd(rng)};
  const auto nr = normalize(ComplexField1D(g, r));
  // independent quadrature: explicit trapezoid weights
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    s += (i == 0 || i + 1 == g.size() ? 0.5 : 1.0) * g.spacing() * std::norm(nr[i]);
  CHECK(std::abs(s - 1.0) < 1e-12);

  CHECK_THROWS_AS(normalize(ComplexField1D(g)), DegenerateInputError);

  const Grid2D g2(Grid1D(-1.0, 1.0, 21), Grid1D(0.0, 3.0, 31));
  const auto f2 = normalize(ComplexField2D::sample(g2, [](double x, double R) { return cplx(1.0 + x * R, R); }));
  CHECK(std::abs(norm(f2) - 1.0) < 1e-12);
}

TEST_CASE("channel basis from a harmonic well") {
  const Grid1D g(-8.0, 8.0, 401);
  const auto basis = system_eigenstates(Harmonic{1.0, 0.0}, 1.0, 1.0, g, 4);
  CHECK(basis.orthonormality_defect() < 1e-8);
  for (std::size_t n = 0; n < 4; ++n) CHECK(basis.energies()[n] == doctest::Approx(n + 0.5).epsilon(1e-3));
  // phase convention: positive at the maximum of |φ|
  for (const auto& s : basis.states()) {
    std::size_t imax = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (std::abs(s[i]) > std::abs(s[imax])) imax = i;
    CHECK(s[imax].real() > 0.0);
  }
  CHECK(basis.truncated(2).size() == 2);

  const auto a = gaussian(g);
  CHECK_THROWS_AS(ChannelBasis(g, {a, a}, {0.5, 0.5}), DegenerateInputError);
}

TEST_CASE("serial and OpenMP kernels agree") {
  const std::size_t nx = 37, nR = 53;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> V(nx * nR);
  for (auto& v : V) v = u(rng);
  std::vector<cplx> in(nx * nR), o1(nx * nR), o2(nx * nR);
  for (auto& z : in) z = {u(rng), u(rng)};
  for (auto order : {StencilOrder::second, StencilOrder::fourth}) {
    kernels::Stencil2D s{nx, nR, V, laplacian_weights(order), -0.7, -0.3};
    kernels::serial::apply_stencil(s, std::span<const cplx>(in), std::span<cplx>(o1));
    kernels::omp::apply_stencil(s, std::span<const cplx>(in), std::span<cplx>(o2));
    CHECK(o1 == o2);
  }
  std::vector<cplx> big(100000);
  for (auto& z : big) z = {u(rng), u(rng)};
  const cplx d1 = kernels::serial::dot(std::span<const cplx>(big), std::span<const cplx>(big));
  const cplx d2 = kernels::omp::dot(std::span<const cplx>(big), std::span<const cplx>(big));
  CHECK(std::abs(d1 - d2) < 1e-9 * std::abs(d1));

  std::vector<cplx> basis(3 * nx), p1(3 * nR), p2(3 * nR);
  for (auto& z : basis) z = {u(rng), u(rng)};
  std::vector<double> w(nx, 0.1);
  kernels::serial::project_rows(basis, 3, w, in, nx, nR, p1);
  kernels::omp::project_rows(basis, 3, w, in, nx, nR, p2);
  CHECK(p1 == p2);
}
