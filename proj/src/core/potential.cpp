#include "emtime/core/potential.hpp"

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <string>

#include "emtime/core/errors.hpp"

namespace emtime {

struct Tabulated::Spline {
  boost::math::interpolators::cardinal_cubic_b_spline<double> s;
};

Tabulated::Tabulated(Grid1D grid, std::vector<double> samples) : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() < 4) throw ShapeError("tabulated potential needs at least 4 samples");
  if (samples_.size() != grid_.size()) throw ShapeError("tabulated potential: samples do not match grid");
  for (double v : samples_)
    if (!std::isfinite(v)) throw DomainError("tabulated potential: non-finite sample");
  spline_ = std::make_shared<const Spline>(
      Spline{boost::math::interpolators::cardinal_cubic_b_spline<double>(samples_.begin(), samples_.end(),
                                                                         grid_.min(), grid_.spacing())});
}

namespace {

void check_span(const Grid1D& g, double q) {
  // Allow a rounding-level excursion past the last node.
  const double tol = 1e-12 * (g.max() - g.min());
  if (!(q >= g.min() - tol && q <= g.max() + tol))
    throw DomainError("tabulated potential evaluated at q = " + std::to_string(q) + " outside [" +
                      std::to_string(g.min()) + ", " + std::to_string(g.max()) + "]");
}

double clamp_to(const Grid1D& g, double q) { return std::min(g.max(), std::max(g.min(), q)); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

double Tabulated::value(double q) const {
  check_span(grid_, q);
  return spline_->s(clamp_to(grid_, q));
}

double Tabulated::derivative(double q) const {
  check_span(grid_, q);
  return spline_->s.prime(clamp_to(grid_, q));
}

double Tabulated::second_derivative(double q) const {
  check_span(grid_, q);
  return spline_->s.double_prime(clamp_to(grid_, q));
}

double eval(const Potential1D& v, double q) {
  return std::visit(overloaded{
                        [q](const Harmonic& p) { return 0.5 * p.k * (q - p.center) * (q - p.center); },
                        [q](const Linear& p) { return p.slope * q; },
                        [](const Constant& p) { return p.value; },
                        [q](const GaussianWell& p) {
                          const double u = (q - p.center) / p.width;
                          return -p.depth * std::exp(-0.5 * u * u);
                        },
                        [q](const Tabulated& p) { return p.value(q); },
                    },
                    v);
}

double derivative(const Potential1D& v, double q) {
  return std::visit(overloaded{
                        [q](const Harmonic& p) { return p.k * (q - p.center); },
                        [](const Linear& p) { return p.slope; },
                        [](const Constant&) { return 0.0; },
                        [q](const GaussianWell& p) {
                          const double u = (q - p.center) / p.width;
                          return p.depth * u / p.width * std::exp(-0.5 * u * u);
                        },
                        [q](const Tabulated& p) { return p.derivative(q); },
                    },
                    v);
}

double second_derivative(const Potential1D& v, double q) {
  return std::visit(overloaded{
                        [](const Harmonic& p) { return p.k; },
                        [](const Linear&) { return 0.0; },
                        [](const Constant&) { return 0.0; },
                        [q](const GaussianWell& p) {
                          const double u = (q - p.center) / p.width;
                          return p.depth / (p.width * p.width) * (1.0 - u * u) * std::exp(-0.5 * u * u);
                        },
                        [q](const Tabulated& p) { return p.second_derivative(q); },
                    },
                    v);
}

double eval(const Coupling2D& v, double x, double R) {
  return std::visit(overloaded{
                        [](const ZeroCoupling&) { return 0.0; },
                        [x, R](const Bilinear& p) { return p.lambda * x * R; },
                        [x, R](const Separable& p) { return eval(p.g, R) * eval(p.h, x); },
                        [x, R](const WindowedPulse& p) {
                          const double u = (R - p.R0) / p.sigma;
                          return p.amplitude * eval(p.h, x) * std::exp(-0.5 * u * u);
                        },
                    },
                    v);
}

double derivative_x(const Coupling2D& v, double x, double R) {
  return std::visit(overloaded{
                        [](const ZeroCoupling&) { return 0.0; },
                        [R](const Bilinear& p) { return p.lambda * R; },
                        [x, R](const Separable& p) { return eval(p.g, R) * derivative(p.h, x); },
                        [x, R](const WindowedPulse& p) {
                          const double u = (R - p.R0) / p.sigma;
                          return p.amplitude * derivative(p.h, x) * std::exp(-0.5 * u * u);
                        },
                    },
                    v);
}

double derivative_R(const Coupling2D& v, double x, double R) {
  return std::visit(overloaded{
                        [](const ZeroCoupling&) { return 0.0; },
                        [x](const Bilinear& p) { return p.lambda * x; },
                        [x, R](const Separable& p) { return derivative(p.g, R) * eval(p.h, x); },
                        [x, R](const WindowedPulse& p) {
                          const double u = (R - p.R0) / p.sigma;
                          return -p.amplitude * eval(p.h, x) * u / p.sigma * std::exp(-0.5 * u * u);
                        },
                    },
                    v);
}

bool is_zero(const Coupling2D& v) noexcept {
  if (std::holds_alternative<ZeroCoupling>(v)) return true;
  if (const auto* b = std::get_if<Bilinear>(&v)) return b->lambda == 0.0;
  if (const auto* w = std::get_if<WindowedPulse>(&v)) return w->amplitude == 0.0;
  return false;
}

std::vector<double> tabulate(const Potential1D& v, const Grid1D& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = eval(v, grid[i]);
  return out;
}

}  // namespace emtime
