#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "starvol/bodies.hpp"
#include "starvol/density.hpp"
#include "starvol/rng.hpp"

namespace starvol {

enum class EvalMode { closed_form, monte_carlo };

/// A radial-function value with an attached Monte Carlo standard error
/// (zero for closed-form evaluation).
struct RadialValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// rho(Z_{p,C}(f), u) for the dual centroid body of f with kernel body C:
///   rho^{-p}(u) = E h^p(C, (<x_j, u>)_j),  x_j i.i.d. ~ f      (p != 0)
///   log rho(u)  = -E log h(C, (<x_j, u>)_j)                     (p = 0)
/// closed_form requires dim(C) = 1 (a segment) and an available marginal;
/// monte_carlo handles any C with `budget` product samples.
RadialValue dual_centroid_radial(const Density& f, const SupportBody& C, double p,
                                 const Eigen::VectorXd& u, EvalMode mode,
                                 std::size_t budget = 0, RngStream* rng = nullptr);

/// Empirical dual centroid body from one block sample:
///   rho^{-p}(u) = N^{-1} sum_i h^p(C_i, X_i^T u)   (p != 0)
///   rho^{-N}(u) = prod_i h(C_i, X_i^T u)           (p = 0)
/// Values may be +inf (p <= 0 with thin blocks); volume integrators tolerate
/// that on null sets.
StarBody empirical_dual_centroid(const BlockSampleMatrix& X, const std::vector<SupportBody>& C,
                                 double p);

/// Support function of the classical empirical L_p centroid body, p >= 1:
/// h^p(u) = N^{-1} sum_i |<X_i, u>|^p; p = +inf gives max_i |<X_i, u>|.
double classical_centroid_support(const Eigen::MatrixXd& cols, double p, const Eigen::VectorXd& u);

/// rho(I(f), u) = integral of f over u^perp = marginal of f at zero.
RadialValue intersection_radial(const Density& f, const Eigen::VectorXd& u);

/// rho^{|p|}(I^alpha_{|p|}(f), u) = E_f (<x,u>^2 + alpha^2 ||u||^2)^{-|p|/2},
/// p in [-1, 0), alpha > 0. Returns rho itself.
RadialValue lp_intersection_radial(const Density& f, double p, double alpha,
                                   const Eigen::VectorXd& u, EvalMode mode,
                                   std::size_t budget = 0, RngStream* rng = nullptr);

/// Empirical counterpart: rho^{|p|}(u) = N^{-1} sum_i rho^{|p|}(E^alpha(X_i), u).
double empirical_lp_intersection(const Eigen::MatrixXd& cols, double p, double alpha,
                                 const Eigen::VectorXd& u);
StarBody empirical_lp_intersection_body(const Eigen::MatrixXd& cols, double p, double alpha);

}  // namespace starvol
