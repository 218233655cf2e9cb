#pragma once

#include <span>
#include <vector>

#include "emtime/core/field.hpp"

namespace emtime {

/// Accuracy order of the centered finite-difference stencils.
/// second: 3-point per axis; fourth: 5-point per axis.
enum class StencilOrder { second, fourth };

/// Centered second-derivative weights w[k], k = -r..r, unscaled by 1/h².
std::span<const double> laplacian_weights(StencilOrder order) noexcept;
inline int stencil_radius(StencilOrder order) noexcept { return order == StencilOrder::second ? 1 : 2; }

/// d²f/dq²: centered interior (accuracy `order`), one-sided second order at the edges.
template <class T>
std::vector<T> second_derivative(std::span<const T> f, double h,
                                 StencilOrder order = StencilOrder::second);

/// df/dq: centered interior (accuracy `order`), one-sided second order at the edges.
template <class T>
std::vector<T> first_derivative(std::span<const T> f, double h,
                                StencilOrder order = StencilOrder::second);

ComplexField1D second_derivative(const ComplexField1D& f);
ComplexField1D first_derivative(const ComplexField1D& f);

/// Three-point derivatives on a non-uniform abscissa (second order in the local spacing).
template <class T>
std::vector<T> first_derivative_nonuniform(std::span<const T> f, std::span<const double> q);
template <class T>
std::vector<T> second_derivative_nonuniform(std::span<const T> f, std::span<const double> q);

}  // namespace emtime
