#pragma once

#include <vector>

#include "emtime/core/field.hpp"
#include "emtime/core/time_map.hpp"

namespace emtime::semiclassics {

/// Complex clock reading τ(R) on a grid, τ = 0 at the grid minimum.
struct ComplexTimeMap {
  Grid1D R_grid{0.0, 1.0, 3};
  std::vector<cplx> tau;

  /// max |Im τ| / max |Re τ| over the grid.
  double imaginary_fraction() const;
  /// Real part as a TimeMap; throws DomainError unless Re τ increases strictly.
  TimeMap real_part() const;
};

struct QuantumTimeOptions {
  double hbar = 1.0;
  double threshold = 1e-8;  // |∂χ/∂R| relative to its maximum
};

/// τ(R) = (i/ħ) M ∫ χ/(∂χ/∂R′) dR′, using ∂ ln χ = ∂ ln|χ| + i ∂ arg χ with the
/// phase unwrapped. Throws NodeError where χ vanishes and StationaryPointError
/// where |∂χ/∂R| falls below the threshold.
ComplexTimeMap quantum_time(const ComplexField1D& chi, double M, const QuantumTimeOptions& opts = {});

/// τ(R) = M ∫ A/(A W̃′ − iħ A′) dR′ for χ = A·exp(iW̃/ħ), with A > 0.
ComplexTimeMap polar_time(const Grid1D& R_grid, const std::vector<double>& A, const std::vector<double>& W, double M,
                          double hbar = 1.0);

/// Free clock at fixed momentum P > 0.
struct PerfectClock {
  TimeMap time;        // t = M(R − R_min)/P
  ComplexField1D chi;  // (2πħ)^{−1/2} exp(iPR/ħ)
  double v = 0.0;      // P/M
};

PerfectClock perfect_clock(double M, double P, const Grid1D& R_grid, double hbar = 1.0);

}  // namespace emtime::semiclassics
