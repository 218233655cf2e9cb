#include "emtime/classical/jacobi.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emtime/core/errors.hpp"

namespace emtime::classical {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXd metric_at(const JacobiProblem& pb, const Vec& q) {
  if (pb.metric) return pb.metric(q);
  if (pb.masses.size() == 0) return Eigen::MatrixXd::Identity(q.size(), q.size());
  return pb.masses.asDiagonal();
}

bool diagonal_metric(const JacobiProblem& pb) { return !pb.metric; }

Vec diag_masses(const JacobiProblem& pb, Eigen::Index dim) {
  return pb.masses.size() == 0 ? Vec::Ones(dim) : pb.masses;
}

// Action and (optionally) gradient with respect to every point, endpoints included.
// Returns +inf when a segment midpoint lies in a classically forbidden region.
double action_and_gradient(const JacobiProblem& pb, const std::vector<Vec>& pts, std::vector<Vec>* grad) {
  const std::size_t N = pts.size() - 1;
  const Eigen::Index dim = pts[0].size();
  if (grad) grad->assign(pts.size(), Vec::Zero(dim));
  double W = 0.0;
  const bool diag = diagonal_metric(pb);
  const Vec a = diag ? diag_masses(pb, dim) : Vec();
  for (std::size_t j = 0; j < N; ++j) {
    const Vec mid = 0.5 * (pts[j] + pts[j + 1]);
    const Vec d = pts[j + 1] - pts[j];
    const double kin = pb.E - pb.V(mid);
    if (!(kin > 0.0)) return kInf;
    const double f = std::sqrt(2.0 * kin);
    const Vec Ad = diag ? Vec(a.cwiseProduct(d)) : Vec(metric_at(pb, mid) * d);
    const double L2 = d.dot(Ad);
    if (!(L2 > 0.0)) throw DegenerateInputError("zero-length path segment " + std::to_string(j));
    const double L = std::sqrt(L2);
    W += f * L;
    if (grad && diag) {
      const Vec df = -pb.grad_V(mid) / f;
      const Vec common = 0.5 * L * df;
      const Vec stretch = (f / L) * Ad;
      (*grad)[j] += common - stretch;
      (*grad)[j + 1] += common + stretch;
    }
  }
  if (grad && !diag) {
    // General metric: central differences of the action.
    std::vector<Vec> work = pts;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double h = 1e-6 * std::max(1.0, std::abs(pts[i][c]));
        work[i][c] = pts[i][c] + h;
        const double wp = action_and_gradient(pb, work, nullptr);
        work[i][c] = pts[i][c] - h;
        const double wm = action_and_gradient(pb, work, nullptr);
        work[i][c] = pts[i][c];
        (*grad)[i][c] = (wp - wm) / (2.0 * h);
      }
  }
  return W;
}

// Interior points flattened into one vector.
Vec pack(const std::vector<Vec>& pts) {
  const Eigen::Index dim = pts[0].size();
  Vec z((static_cast<Eigen::Index>(pts.size()) - 2) * dim);
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) z.segment(static_cast<Eigen::Index>(i - 1) * dim, dim) = pts[i];
  return z;
}

void unpack(const Vec& z, std::vector<Vec>& pts) {
  const Eigen::Index dim = pts[0].size();
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) pts[i] = z.segment(static_cast<Eigen::Index>(i - 1) * dim, dim);
}

Vec interior_gradient(const std::vector<Vec>& g) {
  const Eigen::Index dim = g[0].size();
  Vec z((static_cast<Eigen::Index>(g.size()) - 2) * dim);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) z.segment(static_cast<Eigen::Index>(i - 1) * dim, dim) = g[i];
  return z;
}

struct Objective {
  const JacobiProblem& pb;
  std::vector<Vec> pts;

  double operator()(const Vec& z, Vec* g) {
    unpack(z, pts);
    std::vector<Vec> full;
    const double W = action_and_gradient(pb, pts, g ? &full : nullptr);
    if (g && std::isfinite(W)) *g = interior_gradient(full);
    return W;
  }
};

// Sparse Hessian of W in the interior points from finite differences of the
// analytic gradient. Points interact only with their neighbours, so every third
// point can be perturbed at once. Used as the NCG preconditioner.
struct Preconditioner {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  bool ok = false;

  template <class Obj>
  void update(Obj& obj, const Vec& z, Eigen::Index dim) {
    const Eigen::Index n = z.size();
    const Eigen::Index npts = n / dim;
    std::vector<Eigen::Triplet<double>> trip;
    Vec gp, gm;
    for (Eigen::Index color = 0; color < 3; ++color)
      for (Eigen::Index c = 0; c < dim; ++c) {
        Vec zp = z, zm = z;
        for (Eigen::Index i = color; i < npts; i += 3) {
          const double h = 1e-6 * std::max(1.0, z.segment(i * dim, dim).cwiseAbs().maxCoeff());
          zp[i * dim + c] += h;
          zm[i * dim + c] -= h;
        }
        const double Wp = obj(zp, &gp), Wm = obj(zm, &gm);
        if (!std::isfinite(Wp) || !std::isfinite(Wm)) {
          ok = false;
          return;
        }
        for (Eigen::Index i = color; i < npts; i += 3) {
          const double hi = 1e-6 * std::max(1.0, z.segment(i * dim, dim).cwiseAbs().maxCoeff());
          const Eigen::Index col = i * dim + c;
          for (Eigen::Index j = std::max<Eigen::Index>(0, i - 1); j <= std::min(npts - 1, i + 1); ++j)
            for (Eigen::Index r = 0; r < dim; ++r) {
              const Eigen::Index row = j * dim + r;
              trip.emplace_back(row, col, (gp[row] - gm[row]) / (2.0 * hi));
            }
        }
      }
    Eigen::SparseMatrix<double> H(n, n);
    H.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseMatrix<double> Ht = H.transpose();
    H = 0.5 * (H + Ht);
    // Shift until positive definite; the tangential modes are nearly flat.
    double diag_max = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) diag_max = std::max(diag_max, std::abs(H.coeff(k, k)));
    double mu = 1e-10 * diag_max;
    for (int attempt = 0; attempt < 30; ++attempt, mu *= 10.0) {
      Eigen::SparseMatrix<double> I(n, n);
      I.setIdentity();
      ldlt.compute(H + mu * I);
      if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
        ok = true;
        return;
      }
    }
    ok = false;
  }

  Vec solve(const Vec& v) const { return ldlt.solve(v); }
};

}  // namespace

double jacobi_action(const JacobiProblem& pb, const std::vector<Vec>& points) {
  if (points.size() < 2) throw ShapeError("jacobi_action needs at least one segment");
  const double W = action_and_gradient(pb, points, nullptr);
  if (!std::isfinite(W)) throw ForbiddenRegionError("path crosses a classically forbidden region");
  return W;
}

DiscretePath jacobi_path_minimize(const JacobiProblem& pb, const Vec& q_start, const Vec& q_end, std::size_t N,
                                  const JacobiOptions& opt) {
  if (N < 8) throw ShapeError("jacobi_path_minimize needs N >= 8 segments");
  if (q_start.size() != q_end.size()) throw ShapeError("endpoint dimensions differ");
  if (!(pb.E - pb.V(q_start) > 0.0) || !(pb.E - pb.V(q_end) > 0.0))
    throw ForbiddenRegionError("endpoint lies in a classically forbidden region");

  std::vector<Vec> pts;
  if (opt.seed) {
    pts = *opt.seed;
    if (pts.size() != N + 1) throw ShapeError("seed path must have N + 1 points");
    pts.front() = q_start;
    pts.back() = q_end;
  } else {
    for (std::size_t i = 0; i <= N; ++i)
      pts.push_back(q_start + (q_end - q_start) * (static_cast<double>(i) / static_cast<double>(N)));
  }

  Objective obj{pb, pts};
  Vec z = pack(pts);
  Vec g;
  double W = obj(z, &g);
  if (!std::isfinite(W)) throw ForbiddenRegionError("seed path crosses a classically forbidden region");

  DiscretePath out;
  out.E = pb.E;
  out.W_history.push_back(W);
  const bool precondition = diagonal_metric(pb);
  const Eigen::Index dim = q_start.size();
  const std::size_t restart = static_cast<std::size_t>(z.size());
  Preconditioner pre;
  auto apply_pre = [&](const Vec& v) -> Vec { return precondition && pre.ok ? pre.solve(v) : v; };
  if (precondition) pre.update(obj, z, dim);
  Vec s = apply_pre(g);
  Vec d = -s;
  double alpha = precondition ? 1.0 : 1e-2 * (q_end - q_start).norm() / std::max(1.0, g.cwiseAbs().maxCoeff());
  const double seg_len = (q_end - q_start).norm() / static_cast<double>(N);
  std::size_t it = 0;
  int failures = 0;
  for (; it < opt.max_iter; ++it) {
    if (g.size() == 0 || g.cwiseAbs().maxCoeff() < opt.rel_tol * std::abs(W)) break;
    double slope0 = g.dot(d);
    if (!(slope0 < 0.0)) {
      d = -s;
      slope0 = g.dot(d);
      if (!(slope0 < 0.0)) {
        d = -g;
        slope0 = g.dot(d);
      }
    }
    // Line search on the directional derivative: bracket a sign change of
    // φ'(α) = ∇W(z + αd)·d and refine by safeguarded secant steps. Function
    // values alone cannot resolve the final decreases in double precision.
    // Steps are capped at half a mean segment length per point: the action
    // is not bounded below near the turning-point boundary, so long steps can
    // leave the basin of the physical path.
    const double a_max = 0.5 * seg_len / std::max(d.cwiseAbs().maxCoeff(), 1e-300);
    double lo = 0.0, slope_lo = slope0, hi = -1.0, slope_hi = 0.0;
    double a = std::min(precondition ? 1.0 : alpha, a_max);
    double W_a = kInf;
    Vec g_a;
    for (int k = 0; k < 60; ++k) {
      W_a = obj(z + a * d, &g_a);
      if (!std::isfinite(W_a)) {
        hi = a;
        slope_hi = kInf;
        a = 0.5 * (lo + a);
        continue;
      }
      const double sl = g_a.dot(d);
      if (std::abs(sl) <= 0.1 * std::abs(slope0)) break;
      if (sl < 0.0) {
        lo = a;
        slope_lo = sl;
      } else {
        hi = a;
        slope_hi = sl;
      }
      if (hi < 0.0) {
        if (a >= a_max) break;
        a = std::min(2.0 * a, a_max);
      } else if (std::isfinite(slope_hi)) {
        const double sec = lo - slope_lo * (hi - lo) / (slope_hi - slope_lo);
        const double span = hi - lo;
        a = std::clamp(sec, lo + 0.05 * span, hi - 0.05 * span);
      } else {
        a = 0.5 * (lo + hi);
      }
    }
    const double round = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(W);
    if (!std::isfinite(W_a) || W_a > W + round) {
      // Restart along the steepest-descent direction with Armijo backtracking.
      if (++failures > 8) break;
      d = -g;
      a = std::min(std::max(alpha, 1e-3), 0.5 * seg_len / std::max(g.cwiseAbs().maxCoeff(), 1e-300));
      for (int k = 0; k < 80; ++k) {
        W_a = obj(z + a * d, &g_a);
        if (std::isfinite(W_a) && W_a <= W + 1e-4 * a * g.dot(d)) break;
        a *= 0.5;
      }
      if (!std::isfinite(W_a) || W_a > W + round) {
        if (precondition) pre.update(obj, z, dim);
        s = apply_pre(g);
        d = -s;
        continue;
      }
    } else {
      failures = 0;
    }
    z += a * d;
    alpha = a;
    if (precondition) pre.update(obj, z, dim);
    const Vec s_new = apply_pre(g_a);
    const double beta =
        (it + 1) % restart == 0 ? 0.0 : std::max(0.0, s_new.dot(g_a - g) / std::max(s.dot(g), 1e-300));
    d = -s_new + beta * d;
    g = g_a;
    s = s_new;
    W = W_a;
    out.W_history.push_back(W);
  }

  unpack(z, obj.pts);
  out.points = obj.pts;
  out.W = jacobi_action(pb, out.points);
  out.gradient_norm = g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
  out.iterations = it;
  if (!(out.gradient_norm < opt.rel_tol * std::abs(out.W)))
    throw ConvergenceError("jacobi_path_minimize did not converge after " + std::to_string(it) + " iterations",
                           {out.gradient_norm});
  return out;
}

std::vector<Vec> path_momenta(const JacobiProblem& pb, const DiscretePath& path) {
  std::vector<Vec> p;
  const auto& pts = path.points;
  for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
    const Vec mid = 0.5 * (pts[j] + pts[j + 1]);
    const Vec d = pts[j + 1] - pts[j];
    const Vec Ad = metric_at(pb, mid) * d;
    const double L2 = d.dot(Ad);
    if (!(L2 > 0.0)) throw DegenerateInputError("zero-length path segment " + std::to_string(j));
    const double kin = path.E - pb.V(mid);
    if (!(kin > 0.0)) throw ForbiddenRegionError("segment midpoint in a classically forbidden region");
    p.push_back(std::sqrt(2.0 * kin / L2) * Ad);
  }
  return p;
}

std::vector<double> constraint_residuals(const JacobiProblem& pb, const DiscretePath& path) {
  const auto p = path_momenta(pb, path);
  std::vector<double> r;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const Vec mid = 0.5 * (path.points[j] + path.points[j + 1]);
    const Eigen::MatrixXd A = metric_at(pb, mid);
    const double T = 0.5 * p[j].dot(A.ldlt().solve(p[j]));
    r.push_back(std::abs(T + pb.V(mid) - path.E));
  }
  return r;
}

EndpointReport endpoint_momentum_check(const JacobiProblem& pb, const Vec& q_start, const Vec& q_end,
                                       std::size_t N, double delta, const JacobiOptions& opt) {
  EndpointReport rep;
  rep.delta = delta;
  const auto base = jacobi_path_minimize(pb, q_start, q_end, N, opt);
  const auto p = path_momenta(pb, base);
  const std::size_t n = p.size();
  rep.p_end_segment = p[n - 1];
  // Segment momenta live at segment midpoints; extrapolate half a segment.
  rep.p_end = p[n - 1] + 0.5 * (p[n - 1] - p[n - 2]);
  rep.p_start = p[0] + 0.5 * (p[0] - p[1]);

  const Eigen::Index dim = q_end.size();
  rep.dW_dq_end = Vec::Zero(dim);
  rep.dW_dq_start = Vec::Zero(dim);
  JacobiOptions o = opt;
  for (Eigen::Index c = 0; c < dim; ++c) {
    Vec e = Vec::Zero(dim);
    e[c] = delta;
    // Warm-start perturbed problems from the converged base path.
    auto shifted_seed = [&](const Vec& ds, const Vec& de) {
      std::vector<Vec> s = base.points;
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(N);
        s[i] += (1.0 - w) * ds + w * de;
      }
      return s;
    };
    const Vec zero = Vec::Zero(dim);
    o.seed = shifted_seed(zero, e);
    const double Wp = jacobi_path_minimize(pb, q_start, q_end + e, N, o).W;
    o.seed = shifted_seed(zero, -e);
    const double Wm = jacobi_path_minimize(pb, q_start, q_end - e, N, o).W;
    rep.dW_dq_end[c] = (Wp - Wm) / (2.0 * delta);
    o.seed = shifted_seed(e, zero);
    const double Sp = jacobi_path_minimize(pb, q_start + e, q_end, N, o).W;
    o.seed = shifted_seed(-e, zero);
    const double Sm = jacobi_path_minimize(pb, q_start - e, q_end, N, o).W;
    rep.dW_dq_start[c] = (Sp - Sm) / (2.0 * delta);
  }
  rep.mismatch_end = (rep.dW_dq_end - rep.p_end).cwiseAbs().maxCoeff();
  rep.mismatch_start = (rep.dW_dq_start + rep.p_start).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace emtime::classical
