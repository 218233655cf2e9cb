#include <algorithm>
#include <cmath>
#include <string>

#include "emtime/core/errors.hpp"
#include "emtime/core/field.hpp"
#include "emtime/core/grid.hpp"

namespace emtime {

Grid1D::Grid1D(double q_min, double q_max, std::size_t n) : q_min_(q_min), q_max_(q_max), n_(n) {
  if (n < 3) throw ShapeError("Grid1D needs at least 3 nodes, got " + std::to_string(n));
  if (!(q_max > q_min) || !std::isfinite(q_min) || !std::isfinite(q_max))
    throw ShapeError("Grid1D needs finite q_max > q_min");
  h_ = (q_max - q_min) / static_cast<double>(n - 1);
}

std::vector<double> Grid1D::points() const {
  std::vector<double> q(n_);
  for (std::size_t i = 0; i < n_; ++i) q[i] = (*this)[i];
  return q;
}

std::size_t Grid1D::nearest(double q) const noexcept {
  const double s = std::round((q - q_min_) / h_);
  if (s <= 0.0) return 0;
  return std::min(n_ - 1, static_cast<std::size_t>(s));
}

namespace {

void require_finite(std::span<const cplx> v) {
  for (const cplx& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NumericalError("field contains a non-finite sample");
}

}  // namespace

ComplexField1D::ComplexField1D(Grid1D grid) : grid_(grid), values_(grid.size()) {}

ComplexField1D::ComplexField1D(Grid1D grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ShapeError("field has " + std::to_string(values_.size()) + " samples for a grid of " +
                     std::to_string(grid_.size()));
  require_finite(values_);
}

ComplexField1D& ComplexField1D::operator*=(cplx s) {
  for (auto& z : values_) z *= s;
  return *this;
}

ComplexField2D::ComplexField2D(Grid2D grid) : grid_(grid), values_(grid.size()) {}

ComplexField2D::ComplexField2D(Grid2D grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ShapeError("field has " + std::to_string(values_.size()) + " samples for a grid of " +
                     std::to_string(grid_.size()));
  require_finite(values_);
}

ComplexField1D ComplexField2D::slice(std::size_t iR) const {
  const auto first = values_.begin() + static_cast<std::ptrdiff_t>(grid_.index(0, iR));
  return ComplexField1D(grid_.x(), std::vector<cplx>(first, first + static_cast<std::ptrdiff_t>(grid_.nx())));
}

ComplexField2D& ComplexField2D::operator*=(cplx s) {
  for (auto& z : values_) z *= s;
  return *this;
}

}  // namespace emtime
