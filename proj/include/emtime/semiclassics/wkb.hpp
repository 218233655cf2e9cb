#pragma once

#include <vector>

#include "emtime/classical/clock.hpp"
#include "emtime/core/field.hpp"

namespace emtime::semiclassics {

/// Semiclassical clock state χ = A·exp(iW_ε/ħ) with W_ε′ = p and A = p^{−1/2}.
struct WKBState {
  Grid1D R_grid{0.0, 1.0, 3};
  std::vector<double> W;  // action, zero at the grid minimum
  std::vector<double> A;  // amplitude, unnormalized
  std::vector<double> p;  // local momentum
  double E_c = 0.0;
  double M = 1.0;
  double hbar = 1.0;

  ComplexField1D chi() const;
};

/// Throws TurningPointError when the grid reaches a classically forbidden node.
WKBState wkb_environment(const classical::ClockModel& clock, double hbar = 1.0);

/// |ħ W_ε″ / (W_ε′)²| per node: the term dropped when χ is replaced by its WKB
/// form, relative to the retained clock kinetic term.
std::vector<double> qenviron_residual(const WKBState& wkb);

}  // namespace emtime::semiclassics
