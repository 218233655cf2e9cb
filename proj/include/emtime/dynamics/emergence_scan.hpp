#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emtime/core/potential.hpp"
#include "emtime/core/stencil.hpp"

namespace emtime::dynamics {

/// Composite with a free clock in a box R ∈ [R_min, R_max] moving at nominal
/// velocity v and a driven system; the clock mass M is scanned, so Mv² grows
/// while the time dependence seen by the system stays fixed.
struct QuantumEmergenceSetup {
  Potential1D V_sys = Harmonic{1.0, 0.0};
  Coupling2D V_int = WindowedPulse{0.05, 10.0, 2.0, Linear{1.0}};
  double m = 1.0;
  double hbar = 1.0;
  double v = 10.0;
  double R_min = 0.0;
  double R_max = 20.0;
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t nx = 41;
  double points_per_wavelength = 16.0;  // R resolution of the clock wave
  std::size_t min_nR = 401;
  double taper = 0.15;         // directed-component window taper fraction
  double margin = 0.05;        // extra fraction of the box dropped inside the flat window
  std::size_t candidates = 6;  // eigenpairs requested near the target energy
  StencilOrder order = StencilOrder::fourth;
  std::uint64_t seed = 1;
  bool parallel_points = true;
};

struct EmergencePoint {
  double M = 0.0;
  double Mv2 = 0.0;            // M·v̄² with the measured clock velocity
  double E = 0.0;              // composite eigenvalue
  double U_S = 0.0;            // ⟨H_S + V_I⟩ over the window
  double E_c = 0.0;            // E − U_S
  double v_mean = 0.0;
  double v_spread = 0.0;       // max |v − v̄| over the window
  double channel0_weight = 0.0;
  double eigen_residual = 0.0;
  std::size_t nR = 0;
  double residual = 0.0;       // conditional TDSE residual
  double rho = 0.0;            // neglected / retained
  double rho_estimate = 0.0;   // U_S/(2Mv̄²)
  bool ok = false;
  std::string error;
};

struct EmergenceReport {
  std::vector<EmergencePoint> points;
  double slope = 0.0;     // log-log slope of ρ vs Mv² over successful points
  bool monotone = false;  // residual strictly decreasing along successful points
};

/// One scan point. Throws on any stage failure.
EmergencePoint emergence_point(const QuantumEmergenceSetup& setup, double M);

/// Needs ≥ 3 masses in increasing order spanning ≥ ×30 (DomainError otherwise).
/// Stage failures are recorded per point and the fit uses the remaining points.
EmergenceReport emergence_scan(const QuantumEmergenceSetup& setup, const std::vector<double>& masses);

}  // namespace emtime::dynamics
