#include "starvol/sphere_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starvol {

Eigen::VectorXd draw_gaussian(int n, RngStream& rng) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.gaussian();
  return x;
}

Eigen::VectorXd draw_sphere(int n, RngStream& rng) {
  for (;;) {
    Eigen::VectorXd x = draw_gaussian(n, rng);
    const double r = x.norm();
    if (r > 1e-300) return x / r;
  }
}

SphereGrid sphere_quadrature(int n, int resolution, GridMode mode, RngStream* rng) {
  if (n < 2) throw std::invalid_argument("sphere_quadrature: n must be >= 2, got " + std::to_string(n));
  if (resolution < 8) throw std::invalid_argument("sphere_quadrature: resolution must be >= 8");

  SphereGrid g;
  g.dim = n;
  const std::size_t count = static_cast<std::size_t>(resolution);
  g.nodes.reserve(count);
  g.weights.assign(count, 1.0 / static_cast<double>(resolution));

  if (mode == GridMode::deterministic && n == 2) {
    for (int j = 0; j < resolution; ++j) {
      const double th = 2.0 * M_PI * (j + 0.5) / resolution;
      g.nodes.push_back((Eigen::VectorXd(2) << std::cos(th), std::sin(th)).finished());
    }
    return g;
  }
  if (mode == GridMode::deterministic && n == 3) {
    // Fibonacci lattice: z stratified, azimuth stepped by the golden angle.
    const double golden = M_PI * (1.0 + std::sqrt(5.0));
    for (int j = 0; j < resolution; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / resolution;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * (j + 0.5);
      g.nodes.push_back((Eigen::VectorXd(3) << r * std::cos(phi), r * std::sin(phi), z).finished());
    }
    return g;
  }
  if (rng == nullptr)
    throw std::invalid_argument("sphere_quadrature: monte_carlo mode (or n >= 4) needs an RngStream");
  g.deterministic = false;
  for (int j = 0; j < resolution; ++j) g.nodes.push_back(draw_sphere(n, *rng));
  return g;
}

}  // namespace starvol
