#pragma once

#include <complex>
#include <span>
#include <vector>

#include "emtime/core/grid.hpp"

namespace emtime {

using cplx = std::complex<double>;

/// Complex samples on a Grid1D. Carries wavefunctions and complex actions.
class ComplexField1D {
 public:
  explicit ComplexField1D(Grid1D grid);  // zero-filled
  ComplexField1D(Grid1D grid, std::vector<cplx> values);

  template <class F>
  static ComplexField1D sample(const Grid1D& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = cplx(f(grid[i]));
    return ComplexField1D(grid, std::move(v));
  }

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator[](std::size_t i) const noexcept { return values_[i]; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }

  ComplexField1D& operator*=(cplx s);

 private:
  Grid1D grid_;
  std::vector<cplx> values_;
};

/// Complex samples on a Grid2D, x fastest.
class ComplexField2D {
 public:
  explicit ComplexField2D(Grid2D grid);
  ComplexField2D(Grid2D grid, std::vector<cplx> values);

  template <class F>
  static ComplexField2D sample(const Grid2D& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t iR = 0; iR < grid.nR(); ++iR)
      for (std::size_t ix = 0; ix < grid.nx(); ++ix)
        v[grid.index(ix, iR)] = cplx(f(grid.x()[ix], grid.R()[iR]));
    return ComplexField2D(grid, std::move(v));
  }

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  cplx operator()(std::size_t ix, std::size_t iR) const noexcept { return values_[grid_.index(ix, iR)]; }
  cplx& operator()(std::size_t ix, std::size_t iR) noexcept { return values_[grid_.index(ix, iR)]; }
  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }

  /// The x-row at fixed R index.
  ComplexField1D slice(std::size_t iR) const;
  ComplexField2D& operator*=(cplx s);

 private:
  Grid2D grid_;
  std::vector<cplx> values_;
};

}  // namespace emtime
