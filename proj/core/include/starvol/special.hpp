#pragma once

namespace starvol {

/// Volume of the unit Euclidean ball in R^n: pi^{n/2} / Gamma(n/2 + 1).
double unit_ball_volume(int n);
double log_unit_ball_volume(int n);

/// Negative moment of a standard Gaussian vector in R^n:
///   b_{n,s} = E ||xi||^{-s} = n Gamma((n-s)/2) / (2^{s/2+1} Gamma(n/2+1)),
/// valid for 0 < s < n.
double gaussian_neg_moment(int n, double s);

/// Constants of the exponential volume identity and its Gaussian-mixture form.
///
///   c_{n,p}  normalizes |K| = c_{n,p} int exp(-rho^{-p}(K,x)) dx,
///   d_p      fixes exp(-|x|^p) = d_p E_w sqrt(w) exp(-w x^2) for the
///            square-root-tilted positive (p/2)-stable weight w,
///   a_{N,n,p} = c_{n,p} d_p^N.
///
/// d_p is pinned by integrating the identity over the line: the left side
/// integrates to 2 Gamma(1+1/p) while E_w sqrt(w) int exp(-w x^2) dx =
/// sqrt(pi), hence d_p = 2 Gamma(1+1/p) / sqrt(pi).
struct NtConstants {
  double c_np;
  double d_p;
  double a_Nnp;
};
NtConstants nt_constants(int N, int n, double p);

}  // namespace starvol
