#include "emtime/core/fit.hpp"

#include <cmath>

#include "emtime/core/errors.hpp"

namespace emtime {

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("loglog_slope needs two equal-length series of >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw DegenerateInputError("loglog_slope: abscissae coincide");
  return (n * sxy - sx * sy) / den;
}

bool strictly_decreasing(std::span<const double> y) noexcept {
  for (std::size_t i = 1; i < y.size(); ++i)
    if (!(y[i] < y[i - 1])) return false;
  return true;
}

}  // namespace emtime
