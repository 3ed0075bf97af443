#pragma once

#include <functional>
#include <vector>

namespace starvol {

/// Adaptive 1-D quadrature of f over [a, b] (GSL QAGS behind the scenes).
/// Handles integrable endpoint/interior singularities such as |t|^p, p > -1,
/// or log|t|, provided the singular abscissae are listed in `breakpoints`.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::vector<double> breakpoints = {},
                 double abs_tol = 1e-11, double rel_tol = 1e-10);

/// Fixed Gauss-Legendre rule on [a, b]: returns {node, weight} pairs.
std::vector<std::pair<double, double>> gauss_legendre(int order, double a, double b);

}  // namespace starvol
