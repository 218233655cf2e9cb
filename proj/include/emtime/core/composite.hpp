#pragma once

#include <optional>

#include "emtime/core/potential.hpp"

namespace emtime {

/// The closed composite: clock/environment coordinate R (mass M) and system
/// coordinate x (mass m), H = p_R²/2M + p_x²/2m + V_env(R) + V_sys(x) + V_int(x, R).
struct CompositeSpec {
  double M = 1.0;
  double m = 1.0;
  double hbar = 1.0;
  std::optional<double> E;    // total energy
  std::optional<double> E_c;  // clock energy
  Potential1D V_env = Constant{0.0};
  Potential1D V_sys = Constant{0.0};
  Coupling2D V_int = ZeroCoupling{};

  /// Throws DomainError naming the offending field.
  void validate() const;

  double total_potential(double x, double R) const {
    return eval(V_env, R) + eval(V_sys, x) + eval(V_int, x, R);
  }
};

}  // namespace emtime
