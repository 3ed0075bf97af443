#pragma once

#include <Eigen/Core>

#include <vector>

#include "starvol/bodies.hpp"
#include "starvol/estimate.hpp"
#include "starvol/rng.hpp"
#include "starvol/sphere_grid.hpp"

namespace starvol {

/// |K| = omega_n * sum_j w_j rho(K, u_j)^n. Infinite/NaN nodes are dropped and
/// counted; more than 1% of them is an error (the body is effectively
/// unbounded, not merely infinite on a null set).
Estimate volume_radial(const StarBody& K, const SphereGrid& grid);

/// Like volume_radial but also reports the dropped-node count.
Estimate volume_radial_counted(const StarBody& K, const SphereGrid& grid,
                               std::size_t* dropped_nodes);

/// Estimate of int_{S^{n-1}} rho^s dsigma through the Gaussian moment identity
/// E_xi rho^s(K, xi) = b_{n,s} int rho^s dsigma, 0 < s < n. Directions come
/// from Gaussian draws; the radial factor E ||xi||^{-s} = b_{n,s} is carried
/// in closed form (by homogeneity the integrand splits), which keeps the
/// estimator's variance finite all the way up to s -> n.
Estimate volume_gaussian(const StarBody& K, double s, std::size_t budget, RngStream& rng);

/// |K| from the s -> n limit of the Gaussian route: evaluates at
/// s = n - 1/l for l in {2,4,8,16} on shared draws and Richardson-extrapolates
/// to s = n. The extrapolation is a fixed linear combination applied per
/// sample, so the reported standard error is exact for the combined estimator.
Estimate volume_gaussian_extrapolated(const StarBody& K, std::size_t budget, RngStream& rng);

/// |K| = c_{n,p} int exp(-rho^{-p}(K, x)) dx, p > 0.
/// Quadrature mode integrates the radial coordinate in closed form (the
/// direction integral reduces to the radial volume formula on `grid`).
Estimate volume_exponential(const StarBody& K, double p, const SphereGrid& grid);
/// Monte Carlo mode samples x directly in R^n from a matched radial proposal
/// (importance weights bounded by construction), an independent route.
Estimate volume_exponential_mc(const StarBody& K, double p, std::size_t budget, RngStream& rng);

/// |(X_W B_2^N)°| = omega_n det(sum_i w_i x_i x_i^T)^{-1/2}, exact linear algebra.
Estimate polar_volume_determinant(const Eigen::MatrixXd& X, const Eigen::VectorXd& w);

struct MixtureConfig {
  std::size_t budget = 100000;            // tilted stable draws
  enum class Inner { determinant, sphere_quadrature } inner = Inner::determinant;
  int quad_resolution = 256;              // for the sphere_quadrature inner volume
};

/// Gaussian-mixture volume formula for sections of B_p^N, 0 < p < 2:
///   |B_p^N ∩ Im(X^T)| / det(X X^T)^{1/2}
///     = a_{N,n,p} pi^{n/2} E_W sqrt(w_1...w_N) det(sum w_i x_i x_i^T)^{-1/2},
/// with W i.i.d. square-root-tilted positive (p/2)-stable. The tilted law is
/// realized by self-normalized importance sampling, under which the
/// sqrt(w_1...w_N) factor cancels against the weights exactly.
Estimate nt_mixture_volume(const Eigen::MatrixXd& X, double p, const MixtureConfig& cfg,
                           RngStream& rng);

/// Generalized variant: |Z_{p,C}(F)| for the empirical dual centroid body of
/// the given block sample, with the inner determinant replaced by the polar
/// volume of h_W(u)^2 = sum_i w_i h^2(C_i, X_i^T u).
Estimate nt_mixture_volume_blocks(const BlockSampleMatrix& X, const std::vector<SupportBody>& C,
                                  double p, const MixtureConfig& cfg, RngStream& rng);

/// gamma_n( intersection_i (t_i X_i C_i)° ) by Monte Carlo membership counting.
Estimate gaussian_measure_polar(const BlockSampleMatrix& X, const std::vector<SupportBody>& C,
                                const Eigen::VectorXd& scales, std::size_t budget, RngStream& rng);

/// Consistency check between a power of the empirical radial function and its
/// layer-cake representation as a t-integral of polar membership indicators.
struct IndicatorRepReport {
  double direct = 0.0;       // rho power computed from the h-products
  double mc_value = 0.0;     // importance-sampled t-integral of the indicator
  double mc_std_error = 0.0;
  std::size_t budget = 0;
  double z = 0.0;            // |mc - direct| / se
  bool consistent = false;   // within 4 standard errors
  bool inconclusive = false; // CI too wide to certify
};

/// p = 0 case: rho^s(Z_0, u) = int_{R_+^N} [u in (X B_1^N(C_{s,t}°))°] dt,
/// membership realized as max_i t_i^{N/s} h(C_i, X_i^T u) <= 1.
IndicatorRepReport indicator_rep_check_p0(const BlockSampleMatrix& X,
                                          const std::vector<SupportBody>& C, double s,
                                          const Eigen::VectorXd& u, std::size_t budget,
                                          RngStream& rng);

/// p in [-1, 0) case with k-th power multinomial expansion:
/// rho^{k|p|}(Z_p, u) = N^{-k} sum_{compositions k_ of k} (k choose k_)
///   int [u in cap_i (t_i^{1/(k_i|p|)} X_i C_i)°] dt.
IndicatorRepReport indicator_rep_check_neg(const BlockSampleMatrix& X,
                                           const std::vector<SupportBody>& C, double p, int k,
                                           const Eigen::VectorXd& u, std::size_t budget,
                                           RngStream& rng);

}  // namespace starvol
