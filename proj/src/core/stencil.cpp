#include "emtime/core/stencil.hpp"

#include <array>
#include <complex>

#include "emtime/core/errors.hpp"

namespace emtime {

namespace {

constexpr std::array<double, 3> kLap2{1.0, -2.0, 1.0};
constexpr std::array<double, 5> kLap4{-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};

template <class T>
void require_points(std::span<const T> f, std::size_t n) {
  if (f.size() < n) throw ShapeError("finite-difference stencil needs at least " + std::to_string(n) + " samples");
}

}  // namespace

std::span<const double> laplacian_weights(StencilOrder order) noexcept {
  if (order == StencilOrder::second) return kLap2;
  return kLap4;
}

template <class T>
std::vector<T> second_derivative(std::span<const T> f, double h, StencilOrder order) {
  require_points(f, 3);
  const std::size_t n = f.size();
  const double ih2 = 1.0 / (h * h);
  std::vector<T> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * ih2;
  if (order == StencilOrder::fourth && n >= 5) {
    for (std::size_t i = 2; i + 2 < n; ++i)
      d[i] = (-(f[i - 2] + f[i + 2]) / 12.0 + 4.0 / 3.0 * (f[i - 1] + f[i + 1]) - 2.5 * f[i]) * ih2;
  }
  if (n >= 4) {
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * ih2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * ih2;
  } else {
    d[0] = d[1];
    d[n - 1] = d[1];
  }
  return d;
}

template <class T>
std::vector<T> first_derivative(std::span<const T> f, double h, StencilOrder order) {
  require_points(f, 3);
  const std::size_t n = f.size();
  const double ih = 1.0 / h;
  std::vector<T> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = 0.5 * (f[i + 1] - f[i - 1]) * ih;
  if (order == StencilOrder::fourth && n >= 5) {
    for (std::size_t i = 2; i + 2 < n; ++i)
      d[i] = ((f[i - 2] - f[i + 2]) / 12.0 + 2.0 / 3.0 * (f[i + 1] - f[i - 1])) * ih;
  }
  d[0] = (-1.5 * f[0] + 2.0 * f[1] - 0.5 * f[2]) * ih;
  d[n - 1] = (1.5 * f[n - 1] - 2.0 * f[n - 2] + 0.5 * f[n - 3]) * ih;
  return d;
}

template <class T>
std::vector<T> first_derivative_nonuniform(std::span<const T> f, std::span<const double> q) {
  require_points(f, 3);
  if (q.size() != f.size()) throw ShapeError("abscissa and samples differ in length");
  const std::size_t n = f.size();
  std::vector<T> d(n);
  auto three_point = [&](std::size_t a, std::size_t b, std::size_t c, double at) {
    // derivative of the quadratic through (q_a, f_a), (q_b, f_b), (q_c, f_c) at `at`
    const double xa = q[a], xb = q[b], xc = q[c];
    const double la = ((at - xb) + (at - xc)) / ((xa - xb) * (xa - xc));
    const double lb = ((at - xa) + (at - xc)) / ((xb - xa) * (xb - xc));
    const double lc = ((at - xa) + (at - xb)) / ((xc - xa) * (xc - xb));
    return la * f[a] + lb * f[b] + lc * f[c];
  };
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1, q[i]);
  d[0] = three_point(0, 1, 2, q[0]);
  d[n - 1] = three_point(n - 3, n - 2, n - 1, q[n - 1]);
  return d;
}

template <class T>
std::vector<T> second_derivative_nonuniform(std::span<const T> f, std::span<const double> q) {
  require_points(f, 3);
  if (q.size() != f.size()) throw ShapeError("abscissa and samples differ in length");
  const std::size_t n = f.size();
  std::vector<T> d(n);
  auto three_point = [&](std::size_t a, std::size_t b, std::size_t c) {
    const double xa = q[a], xb = q[b], xc = q[c];
    return 2.0 * f[a] / ((xa - xb) * (xa - xc)) + 2.0 * f[b] / ((xb - xa) * (xb - xc)) +
           2.0 * f[c] / ((xc - xa) * (xc - xb));
  };
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1);
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

template std::vector<double> second_derivative<double>(std::span<const double>, double, StencilOrder);
template std::vector<cplx> second_derivative<cplx>(std::span<const cplx>, double, StencilOrder);
template std::vector<double> first_derivative<double>(std::span<const double>, double, StencilOrder);
template std::vector<cplx> first_derivative<cplx>(std::span<const cplx>, double, StencilOrder);
template std::vector<double> first_derivative_nonuniform<double>(std::span<const double>, std::span<const double>);
template std::vector<cplx> first_derivative_nonuniform<cplx>(std::span<const cplx>, std::span<const double>);
template std::vector<double> second_derivative_nonuniform<double>(std::span<const double>, std::span<const double>);
template std::vector<cplx> second_derivative_nonuniform<cplx>(std::span<const cplx>, std::span<const double>);

ComplexField1D second_derivative(const ComplexField1D& f) {
  return ComplexField1D(f.grid(), second_derivative<cplx>(f.values(), f.grid().spacing()));
}

ComplexField1D first_derivative(const ComplexField1D& f) {
  return ComplexField1D(f.grid(), first_derivative<cplx>(f.values(), f.grid().spacing()));
}

}  // namespace emtime
