#include "emtime/semiclassics/wkb.hpp"

#include <cmath>

#include "emtime/core/errors.hpp"
#include "emtime/core/stencil.hpp"

namespace emtime::semiclassics {

ComplexField1D WKBState::chi() const {
  std::vector<cplx> v(R_grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::polar(A[i], W[i] / hbar);
  return ComplexField1D(R_grid, std::move(v));
}

WKBState wkb_environment(const classical::ClockModel& clock, double hbar) {
  if (!(hbar > 0.0)) throw DomainError("wkb_environment: hbar must be positive");
  if (!(clock.M > 0.0)) throw DomainError("wkb_environment: M must be positive");
  WKBState s;
  s.R_grid = clock.R_grid;
  s.p = classical::clock_momentum_table(clock);
  s.W = classical::clock_action(clock);
  s.A.resize(s.p.size());
  for (std::size_t i = 0; i < s.p.size(); ++i) s.A[i] = 1.0 / std::sqrt(s.p[i]);
  s.E_c = clock.E_c;
  s.M = clock.M;
  s.hbar = hbar;
  return s;
}

std::vector<double> qenviron_residual(const WKBState& wkb) {
  if (wkb.p.size() != wkb.R_grid.size()) throw ShapeError("qenviron_residual: momentum table does not match grid");
  // W_ε′ = p is tabulated exactly, so W_ε″ is the derivative of p.
  const auto dp = first_derivative(std::span<const double>(wkb.p), wkb.R_grid.spacing());
  std::vector<double> r(wkb.p.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::abs(wkb.hbar * dp[i] / (wkb.p[i] * wkb.p[i]));
  return r;
}

}  // namespace emtime::semiclassics
