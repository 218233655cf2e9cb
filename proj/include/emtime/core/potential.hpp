#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "emtime/core/grid.hpp"

namespace emtime {

/// ½k(q − center)²
struct Harmonic {
  double k = 1.0;
  double center = 0.0;
};

/// slope·q
struct Linear {
  double slope = 0.0;
};

struct Constant {
  double value = 0.0;
};

/// −depth·exp(−(q − center)²/2width²)
struct GaussianWell {
  double depth = 1.0;
  double width = 1.0;
  double center = 0.0;
};

/// Cubic B-spline through samples on a uniform grid. Evaluating outside the
/// grid span throws DomainError.
class Tabulated {
 public:
  Tabulated(Grid1D grid, std::vector<double> samples);

  const Grid1D& grid() const noexcept { return grid_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  double value(double q) const;
  double derivative(double q) const;
  double second_derivative(double q) const;

 private:
  struct Spline;
  Grid1D grid_;
  std::vector<double> samples_;
  std::shared_ptr<const Spline> spline_;
};

using Potential1D = std::variant<Harmonic, Linear, Constant, GaussianWell, Tabulated>;

double eval(const Potential1D& v, double q);
double derivative(const Potential1D& v, double q);
double second_derivative(const Potential1D& v, double q);

struct ZeroCoupling {};

/// λ·x·R
struct Bilinear {
  double lambda = 0.0;
};

/// g(R)·h(x)
struct Separable {
  Potential1D g;
  Potential1D h;
};

/// A·h(x)·exp(−(R − R0)²/2σ²)
struct WindowedPulse {
  double amplitude = 0.0;
  double R0 = 0.0;
  double sigma = 1.0;
  Potential1D h = Linear{1.0};
};

using Coupling2D = std::variant<ZeroCoupling, Bilinear, Separable, WindowedPulse>;

double eval(const Coupling2D& v, double x, double R);
double derivative_x(const Coupling2D& v, double x, double R);
double derivative_R(const Coupling2D& v, double x, double R);
bool is_zero(const Coupling2D& v) noexcept;

/// Samples of a 1D potential on a grid.
std::vector<double> tabulate(const Potential1D& v, const Grid1D& grid);

}  // namespace emtime
