#pragma once

#include <memory>
#include <vector>

namespace emtime {

/// Monotone real map R ↔ t sampled on a grid, with monotone cubic (PCHIP)
/// interpolation in both directions. t must be strictly increasing.
class TimeMap {
 public:
  TimeMap(std::vector<double> R, std::vector<double> t);

  const std::vector<double>& R() const noexcept { return R_; }
  const std::vector<double>& t() const noexcept { return t_; }
  std::size_t size() const noexcept { return R_.size(); }

  double t_at(double R) const;
  double R_at(double t) const;
  /// dR/dt of the inverse interpolant.
  double dR_dt(double t) const;

 private:
  struct Interp;
  std::vector<double> R_;
  std::vector<double> t_;
  std::shared_ptr<const Interp> interp_;
};

}  // namespace emtime
