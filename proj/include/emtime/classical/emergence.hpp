#pragma once

#include <vector>

#include "emtime/core/potential.hpp"

namespace emtime::classical {

/// How the constant back-reaction Ū_S entering E_c = E − Ū_S is chosen.
enum class BackReactionMode {
  mean,     // mean system energy over the clock's R range (default)
  initial,  // system energy at the start of the run
  fixed,    // the configured value
};

/// Composite with clock (R, mass M scanned) moving at nominal velocity v,
/// compared against the reduced time-dependent system dynamics.
struct ClassicalEmergenceSetup {
  Potential1D V_env = Constant{0.0};
  Potential1D V_sys = Harmonic{1.0, 0.0};
  Coupling2D V_int = Bilinear{0.05};
  double m = 1.0;
  double x0 = 1.0;
  double p0 = 0.0;
  double v = 1.0;    // initial clock velocity
  double R0 = 0.0;
  double span = 10.0;  // composite parameter span
  std::size_t steps = 10000;
  BackReactionMode mode = BackReactionMode::mean;
  double fixed_U_S = 0.0;
};

struct ClassicalScanPoint {
  double M = 0.0;
  double Mv2 = 0.0;
  double E = 0.0;
  double U_S = 0.0;  // Ū_S used for the clock
  double E_c = 0.0;
  double D = 0.0;    // max |x_comp(t(R)) − x_red(t)|
  double ratio_measured = 0.0;  // mean |∂W_S/∂R|²/2M ÷ |∂W_S/∂t|
  double ratio_estimate = 0.0;  // Ū_S / (2Mv²)
  double shift_measured = 0.0;  // mean (H_S − E_S)
  double shift_predicted = 0.0; // mean (−E_S²/(2M v̄²))
  double v_mean = 0.0;          // mean composite clock velocity
  double energy_drift = 0.0;
};

struct ClassicalEmergenceReport {
  std::vector<ClassicalScanPoint> points;
  double slope = 0.0;       // log-log slope of D vs Mv²
  bool monotone = false;    // D strictly decreasing along the scan
};

ClassicalEmergenceReport classical_emergence_compare(const ClassicalEmergenceSetup& setup,
                                                     const std::vector<double>& masses);

/// One scan point; exposed for parallel drivers.
ClassicalScanPoint classical_emergence_point(const ClassicalEmergenceSetup& setup, double M);

}  // namespace emtime::classical
