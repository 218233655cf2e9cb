#include "emtime/classical/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emtime/core/errors.hpp"

namespace emtime::classical {

namespace {

struct Model {
  std::function<double(const Eigen::VectorXd&, double)> V;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> grad;
  Eigen::VectorXd inv_mass;
};

double hamiltonian(const Model& md, const Eigen::VectorXd& q, const Eigen::VectorXd& p, double s) {
  return 0.5 * p.cwiseProduct(md.inv_mass).dot(p) + md.V(q, s);
}

Trajectory leapfrog(const Model& md, const PhaseState& init, double s0, double s1, std::size_t steps) {
  Trajectory tr;
  const double h = (s1 - s0) / static_cast<double>(steps);
  Eigen::VectorXd q = init.q, p = init.p;
  tr.s.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.s.push_back(s0);
  tr.states.push_back({q, p});
  tr.W.push_back(0.0);
  tr.energy.push_back(hamiltonian(md, q, p, s0));
  double W = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double s = s0 + static_cast<double>(k) * h;
    // kick-drift-kick; time-dependent forces at the matching substep times
    const Eigen::VectorXd p_half = p - 0.5 * h * md.grad(q, s);
    const Eigen::VectorXd dq = h * p_half.cwiseProduct(md.inv_mass);
    q += dq;
    W += p_half.dot(dq);
    const double s_next = k + 1 == steps ? s1 : s0 + static_cast<double>(k + 1) * h;
    p = p_half - 0.5 * h * md.grad(q, s_next);
    for (Eigen::Index i = 0; i < q.size(); ++i)
      if (!std::isfinite(q[i]) || !std::isfinite(p[i])) throw StabilityError("leapfrog produced a non-finite state");
    tr.s.push_back(s_next);
    tr.states.push_back({q, p});
    tr.W.push_back(W);
    tr.energy.push_back(hamiltonian(md, q, p, s_next));
  }
  const double E0 = tr.energy.front();
  const double scale = std::max(std::abs(E0), 1e-300);
  for (double e : tr.energy) tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(e - E0) / scale);
  tr.steps = steps;
  return tr;
}

Trajectory with_halving(const Model& md, const PhaseState& init, double s0, double s1, std::size_t steps,
                        const LeapfrogOptions& opt, bool check) {
  if (steps == 0) throw ShapeError("leapfrog needs at least one step");
  for (int attempt = 0;; ++attempt) {
    Trajectory tr = leapfrog(md, init, s0, s1, steps);
    if (!check || !opt.check_drift || tr.max_energy_drift <= opt.drift_tol) return tr;
    if (attempt >= opt.max_halvings)
      throw StabilityError("energy drift " + std::to_string(tr.max_energy_drift) + " exceeds bound with " +
                           std::to_string(steps) + " steps; use a smaller step");
    steps *= 2;
  }
}

}  // namespace

Trajectory integrate_composite(const CompositeSpec& spec, const PhaseState& initial, double span,
                               std::size_t steps, const LeapfrogOptions& opt) {
  spec.validate();
  if (initial.q.size() != 2 || initial.p.size() != 2) throw ShapeError("composite phase state must be (R, x)");
  if (!(span > 0.0)) throw DomainError("integration span must be positive");
  Model md;
  md.inv_mass = Eigen::Vector2d(1.0 / spec.M, 1.0 / spec.m);
  md.V = [&spec](const Eigen::VectorXd& q, double) { return spec.total_potential(q[1], q[0]); };
  md.grad = [&spec](const Eigen::VectorXd& q, double) {
    const double R = q[0], x = q[1];
    Eigen::VectorXd g(2);
    g[0] = derivative(spec.V_env, R) + derivative_R(spec.V_int, x, R);
    g[1] = derivative(spec.V_sys, x) + derivative_x(spec.V_int, x, R);
    return g;
  };
  const double H0 = hamiltonian(md, initial.q, initial.p, 0.0);
  if (!std::isfinite(H0)) throw DomainError("initial composite energy is not finite");
  return with_halving(md, initial, 0.0, span, steps, opt, true);
}

Trajectory integrate_system_reduced(const Potential1D& V_sys, double m, const DrivenPotential* V_I, double x0,
                                    double p0, double t0, double t1, std::size_t steps, const LeapfrogOptions& opt) {
  if (!(m > 0.0)) throw DomainError("m must be positive");
  if (!(t1 > t0)) throw DomainError("time span must be positive");
  Model md;
  md.inv_mass = Eigen::VectorXd::Constant(1, 1.0 / m);
  md.V = [&V_sys, V_I](const Eigen::VectorXd& q, double t) {
    return eval(V_sys, q[0]) + (V_I ? V_I->V(q[0], t) : 0.0);
  };
  md.grad = [&V_sys, V_I](const Eigen::VectorXd& q, double t) {
    return Eigen::VectorXd::Constant(1, derivative(V_sys, q[0]) + (V_I ? V_I->dV_dx(q[0], t) : 0.0));
  };
  PhaseState init{Eigen::VectorXd::Constant(1, x0), Eigen::VectorXd::Constant(1, p0)};
  return with_halving(md, init, t0, t1, steps, opt, V_I == nullptr);
}

}  // namespace emtime::classical
