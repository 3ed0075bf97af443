#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

#include "starvol/rng.hpp"

namespace starvol {

/// Quadrature grid on S^{n-1} against the normalized Haar measure sigma:
/// unit nodes with nonnegative weights summing to one.
struct SphereGrid {
  int dim = 0;
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  bool deterministic = true;

  std::size_t size() const { return nodes.size(); }

  /// sum_j w_j f(u_j), approximating int_{S^{n-1}} f dsigma.
  double integrate(const std::function<double(const Eigen::VectorXd&)>& f) const {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * f(nodes[j]);
    return s;
  }
};

enum class GridMode { deterministic, monte_carlo };

/// n = 2: equally spaced angles (exact for trigonometric polynomials of
/// degree < resolution). n = 3: Fibonacci lattice. n >= 4 or monte_carlo:
/// i.i.d. uniform points with equal weights (rng required).
SphereGrid sphere_quadrature(int n, int resolution, GridMode mode = GridMode::deterministic,
                             RngStream* rng = nullptr);

/// Uniform point on S^{n-1} (normalized Gaussian vector).
Eigen::VectorXd draw_sphere(int n, RngStream& rng);

/// Standard Gaussian vector in R^n.
Eigen::VectorXd draw_gaussian(int n, RngStream& rng);

}  // namespace starvol
