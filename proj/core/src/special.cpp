#include "starvol/special.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace starvol {

double log_unit_ball_volume(int n) {
  if (n < 1) throw std::invalid_argument("unit_ball_volume: n must be >= 1, got " + std::to_string(n));
  return 0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0);
}

double unit_ball_volume(int n) { return std::exp(log_unit_ball_volume(n)); }

double gaussian_neg_moment(int n, double s) {
  if (n < 1) throw std::invalid_argument("gaussian_neg_moment: n must be >= 1");
  if (!(s > 0.0) || !(s < static_cast<double>(n)))
    throw std::invalid_argument("gaussian_neg_moment: requires 0 < s < n, got n=" +
                                std::to_string(n) + ", s=" + std::to_string(s));
  const double log_b = std::log(static_cast<double>(n)) + std::lgamma(0.5 * (n - s)) -
                       (0.5 * s + 1.0) * std::log(2.0) - std::lgamma(0.5 * n + 1.0);
  return std::exp(log_b);
}

NtConstants nt_constants(int N, int n, double p) {
  if (N < 1 || n < 1) throw std::invalid_argument("nt_constants: N and n must be >= 1");
  if (!(p > 0.0)) throw std::invalid_argument("nt_constants: p must be > 0, got p=" + std::to_string(p));
  const double log_c = -std::lgamma(1.0 + n / p);
  const double log_d = std::log(2.0) + std::lgamma(1.0 + 1.0 / p) - 0.5 * std::log(M_PI);
  NtConstants out;
  out.c_np = std::exp(log_c);
  out.d_p = std::exp(log_d);
  out.a_Nnp = std::exp(log_c + N * log_d);
  return out;
}

}  // namespace starvol
