#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "starvol/density.hpp"
#include "starvol/rng.hpp"

namespace starvol {

/// Origin-symmetric convex body given by its support function h(C, .).
/// Immutable; cheap to copy. Invariants: h is even, positively homogeneous of
/// degree one, and r0 ||u|| <= h(u) <= R0 ||u||.
class SupportBody {
 public:
  SupportBody() = default;

  int dim() const { return dim_; }
  double h(const Eigen::VectorXd& u) const { return h_(u); }
  double inradius() const { return r0_; }
  double circumradius() const { return R0_; }
  bool unconditional() const { return unconditional_; }
  const std::string& kind() const { return kind_; }

  static SupportBody make(int dim, std::function<double(const Eigen::VectorXd&)> h,
                          double r0, double R0, bool unconditional, std::string kind);

 private:
  int dim_ = 0;
  std::function<double(const Eigen::VectorXd&)> h_;
  double r0_ = 0.0, R0_ = 0.0;
  bool unconditional_ = false;
  std::string kind_;
};

// constructors for the closure of bodies actually used
SupportBody segment(double halflen = 1.0);                    // [-halflen, halflen] in R^1
SupportBody euclidean_ball(int m, double radius = 1.0);
SupportBody cube(int m, double halfwidth = 1.0);              // [-a, a]^m, h = a ||u||_1
SupportBody cross_polytope(int m, double scale = 1.0);        // conv{+-e_j}, h = s ||u||_inf
SupportBody axis_segment(int m, int axis);                    // [-e_axis, e_axis] embedded in R^m
SupportBody axis_cross(int m, int first_axis, double scale);  // conv{+-e_j : j >= first} in R^m
SupportBody l2_sum(const SupportBody& C, const SupportBody& D);  // h^2 = h_C^2 + h_D^2
SupportBody scaled(double lambda, const SupportBody& C);
SupportBody rotated(const SupportBody& C, const Eigen::MatrixXd& Q);  // h(u) = h_C(Q^T u)
/// [-e_1,e_1] +_2 alpha conv{+-e_j}_{j=2}^{m+1} in R^{m+1}:
/// h(u)^2 = u_1^2 + alpha^2 max_{j>=2} u_j^2.
SupportBody segment_cross_l2(int m, double alpha);

/// rho(C°, u) = 1 / h(C, u); +inf on the kernel of h.
double polar_radial(const SupportBody& C, const Eigen::VectorXd& u);

/// h(C, X_i^T u) = h(X_i C, u) for an n x m_i block X_i.
double block_support(const SupportBody& C, const Eigen::MatrixXd& Xi, const Eigen::VectorXd& u);

/// rho(E^alpha(x), u) for the polar ellipsoid E^alpha(x) = ([-x,x] +_2 alpha B_2^n)°:
/// (⟨x,u⟩^2 + alpha^2 ||u||^2)^{-1/2}.
double ellipsoid_polar_radial(const Eigen::VectorXd& x, double alpha, const Eigen::VectorXd& u);

/// Star-shaped set given by its radial function; degree -1 homogeneous, may
/// take the value +inf off a null set of directions.
class StarBody {
 public:
  StarBody() = default;
  StarBody(int dim, std::function<double(const Eigen::VectorXd&)> rho_unit, std::string kind = "")
      : dim_(dim), rho_unit_(std::move(rho_unit)), kind_(std::move(kind)) {}

  int dim() const { return dim_; }
  const std::string& kind() const { return kind_; }
  /// rho at a unit direction.
  double rho_unit(const Eigen::VectorXd& u) const { return rho_unit_(u); }
  /// rho at any x != 0 (by homogeneity).
  double rho(const Eigen::VectorXd& x) const {
    const double r = x.norm();
    return rho_unit_(x / r) / r;
  }

 private:
  int dim_ = 0;
  std::function<double(const Eigen::VectorXd&)> rho_unit_;
  std::string kind_;
};

StarBody ball_star(int n, double radius);

/// n x M random sample matrix split into N blocks of widths m_i.
struct BlockSampleMatrix {
  Eigen::MatrixXd cols;       // n x M
  std::vector<int> widths;    // m_i
  std::vector<int> offsets;   // column offset of block i
  std::uint64_t seed = 0;
  std::string provenance;

  int n() const { return static_cast<int>(cols.rows()); }
  int blocks() const { return static_cast<int>(widths.size()); }
  int total_cols() const { return static_cast<int>(cols.cols()); }
  Eigen::Block<const Eigen::MatrixXd> block(int i) const {
    return cols.block(0, offsets[static_cast<std::size_t>(i)], cols.rows(),
                      widths[static_cast<std::size_t>(i)]);
  }
};

/// Densities per block column: entry (i, j) is the law of column j of block i.
struct DensityFamily {
  std::vector<std::vector<Density>> per_block;

  static DensityFamily iid(const Density& f, int blocks, int width);
  int blocks() const { return static_cast<int>(per_block.size()); }
};

BlockSampleMatrix draw_blocks(const DensityFamily& F, RngStream& rng);

/// Generalized ball from body list and exponent p in [-1, inf].
struct GeneralizedBall {
  std::vector<SupportBody> bodies;
  double p = 1.0;  // +inf allowed
};

/// Gauge of the generalized ball at a block point: (sum_i h^p(C_i, x_i))^{1/p},
/// the geometric mean power for p = 0, max_i for p = inf. Membership <=> gauge <= 1.
double generalized_ball_gauge(const GeneralizedBall& B, const std::vector<Eigen::VectorXd>& parts);

/// Same gauge evaluated at the pre-image point (X_1^T u, ..., X_N^T u).
double generalized_ball_gauge_at(const GeneralizedBall& B, const BlockSampleMatrix& X,
                                 const Eigen::VectorXd& u);

/// u in intersection_i (t_i X_i C_i)°  <=>  max_i t_i h(C_i, X_i^T u) <= 1.
bool polar_membership(const Eigen::VectorXd& u, const BlockSampleMatrix& X,
                      const std::vector<SupportBody>& C, const Eigen::VectorXd& scales);

}  // namespace starvol
