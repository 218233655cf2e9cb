#pragma once

#include <span>

#include "emtime/core/field.hpp"
#include "emtime/core/stencil.hpp"

namespace emtime::stationary::detail {

/// out = c·Σ_k w_k in[i+k] + V[i]·in[i] on interior nodes; walls held at zero.
/// c = −ħ²/(2·mass·h²).
inline void apply_dirichlet_1d(std::span<const cplx> in, std::span<cplx> out, std::span<const double> V, double c,
                               StencilOrder order) {
  const auto w = laplacian_weights(order);
  const auto r = static_cast<std::ptrdiff_t>(stencil_radius(order));
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  out[0] = out[static_cast<std::size_t>(n - 1)] = 0.0;
  for (std::ptrdiff_t i = 1; i + 1 < n; ++i) {
    cplx acc = V.empty() ? cplx(0.0) : V[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(i)];
    for (std::ptrdiff_t k = -r; k <= r; ++k) {
      const std::ptrdiff_t j = i + k;
      if (j >= 1 && j + 1 < n) acc += c * w[static_cast<std::size_t>(k + r)] * in[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
}

/// Trapezoid weights of a uniform grid.
inline std::vector<double> trapezoid_weights(const Grid1D& g) {
  std::vector<double> w(g.size(), g.spacing());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

}  // namespace emtime::stationary::detail
