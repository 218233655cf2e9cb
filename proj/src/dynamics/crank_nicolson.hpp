#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "emtime/core/errors.hpp"
#include "emtime/core/field.hpp"

namespace emtime::dynamics::detail {

/// One trapezoidal step (1 + aH)ψ' = (1 − aH)ψ for H = −c∂²ₓ(3-point) + diag(V)
/// on interior nodes, a = iΔτ/2ħ. Walls stay zero. Works for complex Δτ and V.
class CrankNicolson {
 public:
  CrankNicolson(std::size_t n, double kinetic) : n_(n), c_(kinetic), rhs_(n), cp_(n) {}

  void step(std::span<cplx> psi, std::span<const cplx> V, cplx a) {
    const std::size_t m = n_ - 2;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t i = j + 1;
      const cplx Hpsi = (2.0 * c_ + V[i]) * psi[i] - c_ * (psi[i - 1] + psi[i + 1]);
      rhs_[j] = psi[i] - a * Hpsi;
    }
    // Thomas algorithm: diagonal 1 + a(2c + V), off-diagonals −ac.
    const cplx off = -a * c_;
    cplx denom = 1.0 + a * (2.0 * c_ + V[1]);
    cp_[0] = off / denom;
    rhs_[0] /= denom;
    for (std::size_t j = 1; j < m; ++j) {
      denom = 1.0 + a * (2.0 * c_ + V[j + 1]) - off * cp_[j - 1];
      cp_[j] = off / denom;
      rhs_[j] = (rhs_[j] - off * rhs_[j - 1]) / denom;
    }
    for (std::size_t j = m - 1; j-- > 0;) rhs_[j] -= cp_[j] * rhs_[j + 1];
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(rhs_[j].real()) || !std::isfinite(rhs_[j].imag()))
        throw NumericalError("Crank-Nicolson: tridiagonal solve produced non-finite values");
      psi[j + 1] = rhs_[j];
    }
    psi[0] = psi[n_ - 1] = 0.0;
  }

 private:
  std::size_t n_;
  double c_;  // ħ²/(2m h²)
  std::vector<cplx> rhs_;
  std::vector<cplx> cp_;
};

}  // namespace emtime::dynamics::detail
