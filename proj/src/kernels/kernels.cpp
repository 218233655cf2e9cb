#include "emtime/kernels/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <vector>

namespace emtime::kernels {

namespace {

std::atomic<Backend> g_backend{Backend::openmp};

// Fixed reduction block; keeps omp::dot independent of the thread count.
constexpr std::size_t kBlock = 2048;

template <class T>
T conj_if_complex(const T& v) {
  if constexpr (std::is_same_v<T, cplx>) {
    return std::conj(v);
  } else {
    return v;
  }
}

template <class T>
T dot_serial(std::span<const T> a, std::span<const T> b) {
  T s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += conj_if_complex(a[i]) * b[i];
  return s;
}

template <class T>
T dot_blocked(std::span<const T> a, std::span<const T> b) {
  const std::size_t n = a.size();
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<T> partial(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t blk = 0; blk < static_cast<std::ptrdiff_t>(nblocks); ++blk) {
    const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    T s{};
    for (std::size_t i = lo; i < hi; ++i) s += conj_if_complex(a[i]) * b[i];
    partial[static_cast<std::size_t>(blk)] = s;
  }
  T s{};
  for (const T& p : partial) s += p;
  return s;
}

template <class T>
inline void stencil_row(const Stencil2D& s, std::span<const T> in, std::span<T> out, std::size_t iR) {
  const std::size_t nx = s.nx, nR = s.nR;
  const auto r = static_cast<std::ptrdiff_t>(s.weights.size() / 2);
  const std::size_t row = iR * nx;
  if (iR == 0 || iR + 1 == nR) {
    std::fill(out.begin() + static_cast<std::ptrdiff_t>(row),
              out.begin() + static_cast<std::ptrdiff_t>(row + nx), T{});
    return;
  }
  out[row] = T{};
  out[row + nx - 1] = T{};
  for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
    const std::size_t idx = row + ix;
    T acc = s.potential[idx] * in[idx];
    for (std::ptrdiff_t k = -r; k <= r; ++k) {
      const double w = s.weights[static_cast<std::size_t>(k + r)];
      const std::ptrdiff_t jx = static_cast<std::ptrdiff_t>(ix) + k;
      if (jx >= 1 && jx + 1 < static_cast<std::ptrdiff_t>(nx)) acc += (s.cx * w) * in[row + static_cast<std::size_t>(jx)];
      const std::ptrdiff_t jR = static_cast<std::ptrdiff_t>(iR) + k;
      if (jR >= 1 && jR + 1 < static_cast<std::ptrdiff_t>(nR))
        acc += (s.cR * w) * in[static_cast<std::size_t>(jR) * nx + ix];
    }
    out[idx] = acc;
  }
}

template <class T>
void apply_serial(const Stencil2D& s, std::span<const T> in, std::span<T> out) {
  for (std::size_t iR = 0; iR < s.nR; ++iR) stencil_row(s, in, out, iR);
}

template <class T>
void apply_omp(const Stencil2D& s, std::span<const T> in, std::span<T> out) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t iR = 0; iR < static_cast<std::ptrdiff_t>(s.nR); ++iR)
    stencil_row(s, in, out, static_cast<std::size_t>(iR));
}

inline void project_one(std::span<const cplx> basis, std::size_t n, std::span<const double> wx,
                        std::span<const cplx> field, std::size_t nx, std::size_t nR, std::size_t iR,
                        std::span<cplx> out) {
  cplx acc{};
  const std::size_t b0 = n * nx, f0 = iR * nx;
  for (std::size_t x = 0; x < nx; ++x) acc += wx[x] * std::conj(basis[b0 + x]) * field[f0 + x];
  out[n * nR + iR] = acc;
}

}  // namespace

Backend backend() noexcept { return g_backend.load(); }
void set_backend(Backend b) noexcept { g_backend.store(b); }

namespace serial {
cplx dot(std::span<const cplx> a, std::span<const cplx> b) { return dot_serial(a, b); }
double dot(std::span<const double> a, std::span<const double> b) { return dot_serial(a, b); }
void apply_stencil(const Stencil2D& s, std::span<const double> in, std::span<double> out) { apply_serial(s, in, out); }
void apply_stencil(const Stencil2D& s, std::span<const cplx> in, std::span<cplx> out) { apply_serial(s, in, out); }
void project_rows(std::span<const cplx> basis, std::size_t nbasis, std::span<const double> wx,
                  std::span<const cplx> field, std::size_t nx, std::size_t nR, std::span<cplx> out) {
  for (std::size_t n = 0; n < nbasis; ++n)
    for (std::size_t iR = 0; iR < nR; ++iR) project_one(basis, n, wx, field, nx, nR, iR, out);
}
}  // namespace serial

namespace omp {
cplx dot(std::span<const cplx> a, std::span<const cplx> b) { return dot_blocked(a, b); }
double dot(std::span<const double> a, std::span<const double> b) { return dot_blocked(a, b); }
void apply_stencil(const Stencil2D& s, std::span<const double> in, std::span<double> out) { apply_omp(s, in, out); }
void apply_stencil(const Stencil2D& s, std::span<const cplx> in, std::span<cplx> out) { apply_omp(s, in, out); }
void project_rows(std::span<const cplx> basis, std::size_t nbasis, std::span<const double> wx,
                  std::span<const cplx> field, std::size_t nx, std::size_t nR, std::span<cplx> out) {
  const auto total = static_cast<std::ptrdiff_t>(nbasis * nR);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const auto n = static_cast<std::size_t>(k) / nR, iR = static_cast<std::size_t>(k) % nR;
    project_one(basis, n, wx, field, nx, nR, iR, out);
  }
}
}  // namespace omp

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  return backend() == Backend::serial ? serial::dot(a, b) : omp::dot(a, b);
}
double dot(std::span<const double> a, std::span<const double> b) {
  return backend() == Backend::serial ? serial::dot(a, b) : omp::dot(a, b);
}
void apply_stencil(const Stencil2D& s, std::span<const double> in, std::span<double> out) {
  backend() == Backend::serial ? serial::apply_stencil(s, in, out) : omp::apply_stencil(s, in, out);
}
void apply_stencil(const Stencil2D& s, std::span<const cplx> in, std::span<cplx> out) {
  backend() == Backend::serial ? serial::apply_stencil(s, in, out) : omp::apply_stencil(s, in, out);
}
void project_rows(std::span<const cplx> basis, std::size_t nbasis, std::span<const double> wx,
                  std::span<const cplx> field, std::size_t nx, std::size_t nR, std::span<cplx> out) {
  backend() == Backend::serial ? serial::project_rows(basis, nbasis, wx, field, nx, nR, out)
                               : omp::project_rows(basis, nbasis, wx, field, nx, nR, out);
}

}  // namespace emtime::kernels
