#include "starvol/stable.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starvol {

double sample_positive_stable(double alpha, RngStream& rng) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("sample_positive_stable: alpha must lie in (0,1), got " +
                                std::to_string(alpha));
  const double u = rng.uniform(0.0, M_PI);
  const double e = rng.exponential();
  // log A(u); evaluated in logs so u near 0 or pi stays finite
  const double log_a = (alpha * std::log(std::sin(alpha * u)) +
                        (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * u)) -
                        std::log(std::sin(u))) /
                       (1.0 - alpha);
  return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(e)));
}

TiltedStableDraw sample_tilted_weight(double p, RngStream& rng) {
  if (!(p > 0.0) || !(p < 2.0))
    throw std::invalid_argument("sample_tilted_weight: p must lie in (0,2), got " +
                                std::to_string(p));
  TiltedStableDraw d;
  d.w = sample_positive_stable(0.5 * p, rng);
  d.importance_weight = 1.0 / std::sqrt(d.w);
  return d;
}

}  // namespace starvol
