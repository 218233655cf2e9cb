#pragma once

#include <span>

namespace emtime {

/// Least-squares slope of log(y) against log(x). Needs ≥ 2 positive pairs.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// True when every y[i+1] < y[i].
bool strictly_decreasing(std::span<const double> y) noexcept;

}  // namespace emtime
