#include "emtime/core/quadrature.hpp"

#include <cmath>

#include "emtime/core/errors.hpp"

namespace emtime {

namespace {

template <class T>
T trapezoid_impl(std::span<const T> f, double h) {
  if (f.size() < 2) return T{};
  T s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

template <class T>
std::vector<T> cumulative_impl(std::span<const T> f, double h) {
  std::vector<T> out(f.size());
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
  return out;
}

}  // namespace

cplx inner_product(const ComplexField1D& a, const ComplexField1D& b) {
  if (!(a.grid() == b.grid())) throw ShapeError("inner_product: grid mismatch");
  std::vector<cplx> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::conj(a[i]) * b[i];
  return trapezoid_impl<cplx>(p, a.grid().spacing());
}

cplx inner_product(const ComplexField2D& a, const ComplexField2D& b) {
  if (!(a.grid() == b.grid())) throw ShapeError("inner_product: grid mismatch");
  const Grid2D& g = a.grid();
  std::vector<cplx> rows(g.nR());
  std::vector<cplx> p(g.nx());
  for (std::size_t iR = 0; iR < g.nR(); ++iR) {
    for (std::size_t ix = 0; ix < g.nx(); ++ix) p[ix] = std::conj(a(ix, iR)) * b(ix, iR);
    rows[iR] = trapezoid_impl<cplx>(p, g.x().spacing());
  }
  return trapezoid_impl<cplx>(rows, g.R().spacing());
}

double norm(const ComplexField1D& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }
double norm(const ComplexField2D& f) { return std::sqrt(std::max(0.0, inner_product(f, f).real())); }

ComplexField1D normalize(ComplexField1D f) {
  const double n = norm(f);
  if (!(n > 0.0)) throw DegenerateInputError("normalize: zero field");
  f *= 1.0 / n;
  return f;
}

ComplexField2D normalize(ComplexField2D f) {
  const double n = norm(f);
  if (!(n > 0.0)) throw DegenerateInputError("normalize: zero field");
  f *= 1.0 / n;
  return f;
}

double trapezoid(std::span<const double> f, double h) { return trapezoid_impl(f, h); }
cplx trapezoid(std::span<const cplx> f, double h) { return trapezoid_impl(f, h); }

std::vector<double> cumulative_trapezoid(std::span<const double> f, double h) { return cumulative_impl(f, h); }
std::vector<cplx> cumulative_trapezoid(std::span<const cplx> f, double h) { return cumulative_impl(f, h); }

std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> q) {
  if (f.size() != q.size()) throw ShapeError("cumulative_trapezoid: abscissa and samples differ in length");
  std::vector<double> out(f.size());
  for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * (q[i] - q[i - 1]) * (f[i - 1] + f[i]);
  return out;
}

}  // namespace emtime
