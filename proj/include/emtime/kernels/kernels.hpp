#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference implementation kept for testing, `omp` is the OpenMP version used
// by default. Reductions in `omp` sum fixed-size blocks in index order, so the
// result does not depend on the thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace emtime::kernels {

using cplx = std::complex<double>;

enum class Backend { serial, openmp };

Backend backend() noexcept;
void set_backend(Backend b) noexcept;

/// Matrix-free description of a Dirichlet 2D Hamiltonian on an nx × nR grid
/// (x fastest). Boundary nodes are clamped to zero on input and output.
struct Stencil2D {
  std::size_t nx = 0;
  std::size_t nR = 0;
  std::span<const double> potential;  // nx * nR
  std::span<const double> weights;    // centered second-derivative weights, size 2r+1
  double cx = 0.0;                    // -hbar²/(2 m hx²)
  double cR = 0.0;                    // -hbar²/(2 M hR²)
};

namespace serial {
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double dot(std::span<const double> a, std::span<const double> b);
void apply_stencil(const Stencil2D& s, std::span<const double> in, std::span<double> out);
void apply_stencil(const Stencil2D& s, std::span<const cplx> in, std::span<cplx> out);
/// out[n * nR + iR] = Σ_x w_x conj(basis[n * nx + x]) field[iR * nx + x]
void project_rows(std::span<const cplx> basis, std::size_t nbasis, std::span<const double> wx,
                  std::span<const cplx> field, std::size_t nx, std::size_t nR, std::span<cplx> out);
}  // namespace serial

namespace omp {
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double dot(std::span<const double> a, std::span<const double> b);
void apply_stencil(const Stencil2D& s, std::span<const double> in, std::span<double> out);
void apply_stencil(const Stencil2D& s, std::span<const cplx> in, std::span<cplx> out);
void project_rows(std::span<const cplx> basis, std::size_t nbasis, std::span<const double> wx,
                  std::span<const cplx> field, std::size_t nx, std::size_t nR, std::span<cplx> out);
}  // namespace omp

// Dispatch on backend().
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double dot(std::span<const double> a, std::span<const double> b);
void apply_stencil(const Stencil2D& s, std::span<const double> in, std::span<double> out);
void apply_stencil(const Stencil2D& s, std::span<const cplx> in, std::span<cplx> out);
void project_rows(std::span<const cplx> basis, std::size_t nbasis, std::span<const double> wx,
                  std::span<const cplx> field, std::size_t nx, std::size_t nR, std::span<cplx> out);

}  // namespace emtime::kernels
