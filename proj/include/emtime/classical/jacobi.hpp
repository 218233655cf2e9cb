#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

namespace emtime::classical {

using Vec = Eigen::VectorXd;

/// Potential, energy and metric for the Jacobi arc-length action
/// W = ∫ f(q) √(dq·A(q)·dq), f = √(2(E − V)).
struct JacobiProblem {
  std::function<double(const Vec&)> V;
  std::function<Vec(const Vec&)> grad_V;
  double E = 1.0;
  /// Diagonal constant metric (masses in physical coordinates). Empty: identity.
  Vec masses;
  /// General symmetric positive-definite a_ik(q); overrides `masses` when set.
  std::function<Eigen::MatrixXd(const Vec&)> metric;
};

struct JacobiOptions {
  double rel_tol = 1e-8;  // max-norm of the gradient relative to W
  std::size_t max_iter = 200000;
  std::optional<std::vector<Vec>> seed;  // full path including endpoints
};

struct DiscretePath {
  std::vector<Vec> points;  // q⁽⁰⁾ … q⁽ᴺ⁾
  double E = 0.0;
  double W = 0.0;
  double gradient_norm = 0.0;  // max-norm of ∂W/∂(interior points)
  std::size_t iterations = 0;
  std::vector<double> W_history;  // accepted values, nonincreasing
};

/// Discretized action Σ f(q̄)√(Δq·A(q̄)·Δq) with q̄ the segment midpoint.
double jacobi_action(const JacobiProblem& pb, const std::vector<Vec>& points);

/// Straight-line seed with N segments followed by nonlinear conjugate gradient
/// (Polak–Ribière+, Armijo backtracking) on the interior points.
DiscretePath jacobi_path_minimize(const JacobiProblem& pb, const Vec& q_start, const Vec& q_end, std::size_t N,
                                  const JacobiOptions& opt = {});

/// Segment momenta p = f(q̄)(Δq·A·Δq)^{−1/2} A·Δq.
std::vector<Vec> path_momenta(const JacobiProblem& pb, const DiscretePath& path);

/// Per-segment |½p·A⁻¹·p + V(q̄) − E|.
std::vector<double> constraint_residuals(const JacobiProblem& pb, const DiscretePath& path);

struct EndpointReport {
  double delta = 0.0;
  Vec dW_dq_end;         // central difference of the minimized W in q_end
  Vec dW_dq_start;       // central difference of the minimized W in q_start
  Vec p_end;             // terminal momentum extrapolated to the endpoint
  Vec p_start;           // initial momentum extrapolated to the endpoint
  Vec p_end_segment;     // raw final-segment momentum
  double mismatch_end = 0.0;    // ‖dW/dq_end − p_end‖_∞
  double mismatch_start = 0.0;  // ‖dW/dq_start + p_start‖_∞
};

EndpointReport endpoint_momentum_check(const JacobiProblem& pb, const Vec& q_start, const Vec& q_end,
                                       std::size_t N, double delta, const JacobiOptions& opt = {});

}  // namespace emtime::classical
