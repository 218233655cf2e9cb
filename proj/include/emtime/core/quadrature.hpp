#pragma once

#include <span>
#include <vector>

#include "emtime/core/field.hpp"

namespace emtime {

/// Trapezoid-rule ∫ conj(a)·b dq. Throws ShapeError on grid mismatch.
cplx inner_product(const ComplexField1D& a, const ComplexField1D& b);
cplx inner_product(const ComplexField2D& a, const ComplexField2D& b);

double norm(const ComplexField1D& f);
double norm(const ComplexField2D& f);

/// Unit L2 norm under the trapezoid rule. Throws DegenerateInputError for a zero field.
ComplexField1D normalize(ComplexField1D f);
ComplexField2D normalize(ComplexField2D f);

/// Trapezoid integral of uniformly spaced samples.
double trapezoid(std::span<const double> f, double h);
cplx trapezoid(std::span<const cplx> f, double h);

/// Running trapezoid integral; result[0] = 0.
std::vector<double> cumulative_trapezoid(std::span<const double> f, double h);
std::vector<cplx> cumulative_trapezoid(std::span<const cplx> f, double h);
/// Same on a non-uniform abscissa.
std::vector<double> cumulative_trapezoid(std::span<const double> f, std::span<const double> q);

}  // namespace emtime
