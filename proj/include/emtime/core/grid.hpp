#pragma once

#include <cstddef>
#include <vector>

namespace emtime {

/// Uniform grid on [q_min, q_max] with n >= 3 nodes (both ends included).
class Grid1D {
 public:
  Grid1D(double q_min, double q_max, std::size_t n);

  double min() const noexcept { return q_min_; }
  double max() const noexcept { return q_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double operator[](std::size_t i) const noexcept { return q_min_ + static_cast<double>(i) * h_; }
  std::vector<double> points() const;

  /// Index of the node nearest to q, clamped to the grid.
  std::size_t nearest(double q) const noexcept;
  bool contains(double q) const noexcept { return q >= q_min_ && q <= q_max_; }

  /// Same span, spacing halved (2n - 1 nodes).
  Grid1D refined() const { return Grid1D(q_min_, q_max_, 2 * n_ - 1); }

  friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
    return a.q_min_ == b.q_min_ && a.q_max_ == b.q_max_ && a.n_ == b.n_;
  }

 private:
  double q_min_;
  double q_max_;
  std::size_t n_;
  double h_;
};

/// Tensor grid over (x, R); storage is row-major with x fastest.
class Grid2D {
 public:
  Grid2D(Grid1D x, Grid1D R) : x_(x), R_(R) {}

  const Grid1D& x() const noexcept { return x_; }
  const Grid1D& R() const noexcept { return R_; }
  std::size_t nx() const noexcept { return x_.size(); }
  std::size_t nR() const noexcept { return R_.size(); }
  std::size_t size() const noexcept { return nx() * nR(); }
  std::size_t index(std::size_t ix, std::size_t iR) const noexcept { return iR * nx() + ix; }

  friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
    return a.x_ == b.x_ && a.R_ == b.R_;
  }

 private:
  Grid1D x_;
  Grid1D R_;
};

}  // namespace emtime
