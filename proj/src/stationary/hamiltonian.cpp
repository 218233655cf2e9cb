#include "emtime/stationary/hamiltonian.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <string>

#include "emtime/core/errors.hpp"

namespace emtime::stationary {

Hamiltonian2D::Hamiltonian2D(CompositeSpec spec, Grid2D grid, StencilOrder order)
    : spec_(std::move(spec)), grid_(std::move(grid)), order_(order) {
  spec_.validate();
  const std::size_t need = static_cast<std::size_t>(2 * stencil_radius(order_) + 3);
  if (grid_.nx() < need || grid_.nR() < need)
    throw ShapeError("Hamiltonian2D: each axis needs at least " + std::to_string(need) + " nodes");
  potential_.resize(grid_.size());
  for (std::size_t iR = 0; iR < grid_.nR(); ++iR)
    for (std::size_t ix = 0; ix < grid_.nx(); ++ix)
      potential_[grid_.index(ix, iR)] = spec_.total_potential(grid_.x()[ix], grid_.R()[iR]);
}

kernels::Stencil2D Hamiltonian2D::stencil() const noexcept {
  kernels::Stencil2D s;
  s.nx = grid_.nx();
  s.nR = grid_.nR();
  s.potential = potential_;
  s.weights = laplacian_weights(order_);
  const double hx = grid_.x().spacing(), hR = grid_.R().spacing();
  s.cx = -spec_.hbar * spec_.hbar / (2.0 * spec_.m * hx * hx);
  s.cR = -spec_.hbar * spec_.hbar / (2.0 * spec_.M * hR * hR);
  return s;
}

ComplexField2D Hamiltonian2D::apply(const ComplexField2D& f) const {
  if (!(f.grid() == grid_)) throw ShapeError("Hamiltonian2D::apply: field on a different grid");
  ComplexField2D out(grid_);
  kernels::apply_stencil(stencil(), f.values(), out.values());
  return out;
}

void Hamiltonian2D::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != grid_.size() || out.size() != grid_.size()) throw ShapeError("Hamiltonian2D::apply: size");
  kernels::apply_stencil(stencil(), in, out);
}

void Hamiltonian2D::apply(std::span<const cplx> in, std::span<cplx> out) const {
  if (in.size() != grid_.size() || out.size() != grid_.size()) throw ShapeError("Hamiltonian2D::apply: size");
  kernels::apply_stencil(stencil(), in, out);
}

double Hamiltonian2D::norm_estimate() const noexcept {
  const auto s = stencil();
  double wsum = 0.0;
  for (double w : s.weights) wsum += std::abs(w);
  double vmax = 0.0;
  for (double v : potential_) vmax = std::max(vmax, std::abs(v));
  return vmax + wsum * (std::abs(s.cx) + std::abs(s.cR));
}

Eigen::SparseMatrix<double> Hamiltonian2D::to_sparse() const {
  const auto s = stencil();
  const std::size_t mx = grid_.nx() - 2, mR = grid_.nR() - 2;
  const auto r = static_cast<std::ptrdiff_t>(s.weights.size() / 2);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mx * mR * static_cast<std::size_t>(4 * r + 1));
  auto id = [mx](std::size_t ix, std::size_t iR) { return static_cast<int>(iR * mx + ix); };
  for (std::size_t iR = 0; iR < mR; ++iR)
    for (std::size_t ix = 0; ix < mx; ++ix) {
      const int row = id(ix, iR);
      const double w0 = s.weights[static_cast<std::size_t>(r)];
      trip.emplace_back(row, row, potential_[grid_.index(ix + 1, iR + 1)] + (s.cx + s.cR) * w0);
      for (std::ptrdiff_t k = -r; k <= r; ++k) {
        if (k == 0) continue;
        const double w = s.weights[static_cast<std::size_t>(k + r)];
        const std::ptrdiff_t jx = static_cast<std::ptrdiff_t>(ix) + k;
        if (jx >= 0 && jx < static_cast<std::ptrdiff_t>(mx)) trip.emplace_back(row, id(static_cast<std::size_t>(jx), iR), s.cx * w);
        const std::ptrdiff_t jR = static_cast<std::ptrdiff_t>(iR) + k;
        if (jR >= 0 && jR < static_cast<std::ptrdiff_t>(mR)) trip.emplace_back(row, id(ix, static_cast<std::size_t>(jR)), s.cR * w);
      }
    }
  const auto n = static_cast<Eigen::Index>(mx * mR);
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

Hamiltonian2D assemble_tise(const CompositeSpec& spec, const Grid2D& grid, StencilOrder order) {
  return Hamiltonian2D(spec, grid, order);
}

double boundary_amplitude(const ComplexField2D& f) {
  const auto& g = f.grid();
  double peak = 0.0, edge = 0.0;
  for (std::size_t iR = 0; iR < g.nR(); ++iR)
    for (std::size_t ix = 0; ix < g.nx(); ++ix) {
      const double a = std::abs(f(ix, iR));
      peak = std::max(peak, a);
      if (ix <= 1 || iR <= 1 || ix + 2 >= g.nx() || iR + 2 >= g.nR()) edge = std::max(edge, a);
    }
  if (peak == 0.0) throw DegenerateInputError("boundary_amplitude: zero field");
  return edge / peak;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

double kdot(const Vec& a, const Vec& b) {
  return kernels::dot(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                      std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

// Two passes of classical Gram-Schmidt against the columns of Q[0..cols).
void orthogonalize(Vec& w, const Mat& Q, Eigen::Index cols) {
  for (int pass = 0; pass < 2; ++pass)
    for (Eigen::Index j = 0; j < cols; ++j) w.noalias() -= kdot(Q.col(j), w) * Q.col(j);
}

struct Candidate {
  double lambda;
  double residual;
  Vec vec;
};

class ShiftInvertLanczos {
 public:
  ShiftInvertLanczos(const Eigen::SparseMatrix<double>& A, double sigma) : A_(A), sigma_(sigma) {
    Eigen::SparseMatrix<double> S = A;
    for (Eigen::Index i = 0; i < S.rows(); ++i) S.coeffRef(i, i) -= sigma;
    lu_.analyzePattern(S);
    lu_.factorize(S);
    if (lu_.info() != Eigen::Success) throw NumericalError("shift-invert factorization failed");
  }

  // Krylov run of up to m steps from v0, orthogonal to locked[0..L).
  // Returns Ritz candidates ordered by distance of λ to σ.
  std::vector<Candidate> run(Vec v0, const Mat& locked, Eigen::Index L, Eigen::Index m) {
    const Eigen::Index n = A_.rows();
    m = std::min(m, n - L);
    Mat V(n, m + 1);
    Vec alpha = Vec::Zero(m), beta = Vec::Zero(m + 1);
    orthogonalize(v0, locked, L);
    double nv = std::sqrt(kdot(v0, v0));
    if (!(nv > 0.0)) return {};
    V.col(0) = v0 / nv;
    Eigen::Index steps = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      Vec w = lu_.solve(V.col(j));
      alpha(j) = kdot(V.col(j), w);
      orthogonalize(w, locked, L);
      orthogonalize(w, V, j + 1);
      const double b = std::sqrt(kdot(w, w));
      steps = j + 1;
      beta(j + 1) = b;
      if (b < 1e-13 * std::abs(alpha(j)) || b == 0.0) break;
      V.col(j + 1) = w / b;
    }
    Mat T = Mat::Zero(steps, steps);
    for (Eigen::Index j = 0; j < steps; ++j) {
      T(j, j) = alpha(j);
      if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta(j + 1);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(T);
    std::vector<Candidate> out;
    for (Eigen::Index i = 0; i < steps; ++i) {
      const double theta = es.eigenvalues()(i);
      if (theta == 0.0) continue;
      Vec y = V.leftCols(steps) * es.eigenvectors().col(i);
      y /= std::sqrt(kdot(y, y));
      const Vec Ay = A_ * y;
      const double lambda = kdot(y, Ay);
      const Vec r = Ay - lambda * y;
      out.push_back({lambda, std::sqrt(kdot(r, r)), std::move(y)});
    }
    std::sort(out.begin(), out.end(), [this](const Candidate& a, const Candidate& b) {
      return std::abs(a.lambda - sigma_) < std::abs(b.lambda - sigma_);
    });
    return out;
  }

 private:
  const Eigen::SparseMatrix<double>& A_;
  double sigma_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

Vec random_vector(std::mt19937_64& rng, Eigen::Index n) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
  return v;
}

}  // namespace

std::vector<EigenPair> solve_eigenpairs(const Hamiltonian2D& H, double E_target, std::size_t k, std::uint64_t seed,
                                        const EigenOptions& opts) {
  if (k == 0) throw DomainError("solve_eigenpairs: k must be at least 1");
  if (!std::isfinite(E_target)) throw DomainError("solve_eigenpairs: E_target must be finite");
  const Eigen::SparseMatrix<double> A = H.to_sparse();
  const Eigen::Index n = A.rows();
  if (static_cast<Eigen::Index>(k) > n) throw ShapeError("solve_eigenpairs: k exceeds the number of unknowns");
  const double hnorm = H.norm_estimate();

  // An exact eigenvalue at the shift would make the factorization singular.
  double sigma = E_target;
  std::unique_ptr<ShiftInvertLanczos> lanczos;
  for (int attempt = 0; !lanczos; ++attempt) {
    try {
      lanczos = std::make_unique<ShiftInvertLanczos>(A, sigma);
    } catch (const NumericalError&) {
      if (attempt == 3) throw;
      sigma += 1e-9 * (1.0 + std::abs(E_target)) * std::pow(10.0, attempt);
    }
  }

  const Eigen::Index m = static_cast<Eigen::Index>(opts.krylov_dim ? opts.krylov_dim : std::max<std::size_t>(2 * k + 20, 40));
  std::mt19937_64 rng(seed);
  Mat locked(n, std::min<Eigen::Index>(n, static_cast<Eigen::Index>(k) + 16));
  std::vector<double> locked_val;
  auto accept = [&](const Candidate& c) { return c.residual < opts.tol * std::max(std::abs(c.lambda), 1e-12 * hnorm); };
  auto cutoff = [&]() {
    if (locked_val.size() < k) return std::numeric_limits<double>::infinity();
    std::vector<double> d;
    for (double v : locked_val) d.push_back(std::abs(v - sigma));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    return d[k - 1];
  };

  Vec start = random_vector(rng, n);
  bool fresh = true;
  std::vector<double> last_residuals;
  for (std::size_t it = 0; it <= opts.max_restarts; ++it) {
    const auto L = static_cast<Eigen::Index>(locked_val.size());
    const auto cands = lanczos->run(start, locked, L, m);
    const double cut = cutoff();
    const std::size_t want = k > locked_val.size() ? k - locked_val.size() : 1;
    std::vector<const Candidate*> pending;
    bool any = false;
    std::size_t considered = 0;
    last_residuals.clear();
    for (const auto& c : cands) {
      if (!(std::abs(c.lambda - sigma) < cut) || ++considered > want + 2) break;
      last_residuals.push_back(c.residual);
      if (accept(c)) {
        if (locked_val.size() == static_cast<std::size_t>(locked.cols())) locked.conservativeResize(n, locked.cols() + 16);
        Vec v = c.vec;
        orthogonalize(v, locked, static_cast<Eigen::Index>(locked_val.size()));
        const double nv = std::sqrt(kdot(v, v));
        if (nv < 0.5) continue;
        locked.col(static_cast<Eigen::Index>(locked_val.size())) = v / nv;
        locked_val.push_back(c.lambda);
        any = true;
      } else {
        pending.push_back(&c);
      }
    }
    if (locked_val.size() >= k && pending.empty() && !any && fresh) break;
    if (!pending.empty()) {
      start = Vec::Zero(n);
      for (const auto* c : pending) start += c->vec;
      fresh = false;
    } else {
      start = random_vector(rng, n);
      fresh = true;
    }
    if (it == opts.max_restarts)
      throw ConvergenceError("solve_eigenpairs: not converged after " + std::to_string(it) + " restarts",
                             last_residuals);
  }

  std::vector<std::size_t> order(locked_val.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(locked_val[a] - sigma) < std::abs(locked_val[b] - sigma);
  });
  order.resize(k);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return locked_val[a] < locked_val[b]; });

  const auto& g = H.grid();
  const std::size_t mx = g.nx() - 2;
  const double scale = 1.0 / std::sqrt(g.x().spacing() * g.R().spacing());
  std::vector<EigenPair> out;
  for (std::size_t idx : order) {
    Vec y = locked.col(static_cast<Eigen::Index>(idx));
    const Vec Ay = A * y;
    const double lambda = kdot(y, Ay);
    const Vec r = Ay - lambda * y;
    Eigen::Index imax = 0;
    y.cwiseAbs().maxCoeff(&imax);
    if (y(imax) < 0.0) y = -y;
    ComplexField2D f(g);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      f(ju % mx + 1, ju / mx + 1) = scale * y(j);
    }
    out.push_back({lambda, std::move(f), std::sqrt(kdot(r, r))});
  }
  return out;
}

}  // namespace emtime::stationary
