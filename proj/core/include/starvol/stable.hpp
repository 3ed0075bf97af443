#pragma once

#include "starvol/rng.hpp"

namespace starvol {

/// One sample of the normalized positive alpha-stable law, 0 < alpha < 1,
/// i.e. the positive random variable w with E exp(-t w) = exp(-t^alpha).
/// Exact Kanter representation: w = (A(U)/E)^{(1-alpha)/alpha} with U uniform
/// on (0,pi), E unit exponential and A the Zolotarev function
///   A(u) = [ sin(alpha u)^alpha sin((1-alpha) u)^{1-alpha} / sin(u) ]^{1/(1-alpha)}.
double sample_positive_stable(double alpha, RngStream& rng);

/// Draw targeting the square-root-tilted stable density ~ s^{-1/2} g_{p/2}(s)
/// by importance sampling: w is a plain positive (p/2)-stable sample and
/// importance_weight = w^{-1/2}. Weighted averages must be self-normalized;
/// the tilted density's normalizing constant then cancels.
struct TiltedStableDraw {
  double w;
  double importance_weight;
};
TiltedStableDraw sample_tilted_weight(double p, RngStream& rng);

}  // namespace starvol
