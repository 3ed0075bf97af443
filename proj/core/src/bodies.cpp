#include "starvol/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace starvol {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

SupportBody SupportBody::make(int dim, std::function<double(const Eigen::VectorXd&)> h,
                              double r0, double R0, bool unconditional, std::string kind) {
  if (dim < 1) throw std::invalid_argument("SupportBody: dimension must be >= 1");
  SupportBody b;
  b.dim_ = dim;
  b.h_ = std::move(h);
  b.r0_ = r0;
  b.R0_ = R0;
  b.unconditional_ = unconditional;
  b.kind_ = std::move(kind);
  return b;
}

SupportBody segment(double halflen) {
  if (!(halflen > 0.0)) throw std::invalid_argument("segment: half length must be > 0");
  return SupportBody::make(
      1, [halflen](const Eigen::VectorXd& u) { return halflen * std::abs(u[0]); }, halflen,
      halflen, true, "segment");
}

SupportBody euclidean_ball(int m, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("euclidean_ball: radius must be > 0");
  return SupportBody::make(
      m, [radius](const Eigen::VectorXd& u) { return radius * u.norm(); }, radius, radius, true,
      "euclidean-ball");
}

SupportBody cube(int m, double halfwidth) {
  if (!(halfwidth > 0.0)) throw std::invalid_argument("cube: halfwidth must be > 0");
  return SupportBody::make(
      m, [halfwidth](const Eigen::VectorXd& u) { return halfwidth * u.lpNorm<1>(); }, halfwidth,
      halfwidth * std::sqrt(static_cast<double>(m)), true, "cube");
}

SupportBody cross_polytope(int m, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("cross_polytope: scale must be > 0");
  return SupportBody::make(
      m, [scale](const Eigen::VectorXd& u) { return scale * u.lpNorm<Eigen::Infinity>(); },
      scale / std::sqrt(static_cast<double>(m)), scale, true, "cross-polytope");
}

SupportBody axis_segment(int m, int axis) {
  if (axis < 0 || axis >= m) throw std::invalid_argument("axis_segment: axis out of range");
  return SupportBody::make(
      m, [axis](const Eigen::VectorXd& u) { return std::abs(u[axis]); }, 0.0, 1.0, true,
      "axis-segment");
}

SupportBody axis_cross(int m, int first_axis, double scale) {
  if (first_axis < 0 || first_axis >= m)
    throw std::invalid_argument("axis_cross: first_axis out of range");
  if (!(scale > 0.0)) throw std::invalid_argument("axis_cross: scale must be > 0");
  return SupportBody::make(
      m,
      [first_axis, scale](const Eigen::VectorXd& u) {
        double v = 0.0;
        for (int j = first_axis; j < u.size(); ++j) v = std::max(v, std::abs(u[j]));
        return scale * v;
      },
      0.0, scale, true, "axis-cross");
}

SupportBody l2_sum(const SupportBody& C, const SupportBody& D) {
  if (C.dim() != D.dim()) throw std::invalid_argument("l2_sum: dimension mismatch");
  auto hc = [C](const Eigen::VectorXd& u) { return C.h(u); };
  auto hd = [D](const Eigen::VectorXd& u) { return D.h(u); };
  return SupportBody::make(
      C.dim(),
      [hc, hd](const Eigen::VectorXd& u) { return std::hypot(hc(u), hd(u)); },
      std::max(C.inradius(), D.inradius()), std::hypot(C.circumradius(), D.circumradius()),
      C.unconditional() && D.unconditional(), "l2-sum(" + C.kind() + "," + D.kind() + ")");
}

SupportBody scaled(double lambda, const SupportBody& C) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaled: lambda must be > 0");
  return SupportBody::make(
      C.dim(), [lambda, C](const Eigen::VectorXd& u) { return lambda * C.h(u); },
      lambda * C.inradius(), lambda * C.circumradius(), C.unconditional(),
      "scaled(" + C.kind() + ")");
}

SupportBody rotated(const SupportBody& C, const Eigen::MatrixXd& Q) {
  if (Q.rows() != C.dim() || Q.cols() != C.dim())
    throw std::invalid_argument("rotated: Q must be dim x dim");
  Eigen::MatrixXd Qt = Q.transpose();
  return SupportBody::make(
      C.dim(), [Qt, C](const Eigen::VectorXd& u) { return C.h(Qt * u); }, C.inradius(),
      C.circumradius(), false, "rotated(" + C.kind() + ")");
}

SupportBody segment_cross_l2(int m, double alpha) {
  if (m < 1) throw std::invalid_argument("segment_cross_l2: m must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("segment_cross_l2: alpha must be > 0");
  const int dim = m + 1;
  return SupportBody::make(
      dim,
      [alpha](const Eigen::VectorXd& u) {
        double mx = 0.0;
        for (int j = 1; j < u.size(); ++j) mx = std::max(mx, std::abs(u[j]));
        return std::hypot(u[0], alpha * mx);
      },
      std::min(1.0, alpha / std::sqrt(static_cast<double>(m))), std::hypot(1.0, alpha), true,
      "segment-cross-l2");
}

double polar_radial(const SupportBody& C, const Eigen::VectorXd& u) {
  if (u.norm() == 0.0) throw std::invalid_argument("polar_radial: u must be nonzero");
  const double h = C.h(u);
  return h > 0.0 ? 1.0 / h : kInf;
}

double block_support(const SupportBody& C, const Eigen::MatrixXd& Xi, const Eigen::VectorXd& u) {
  if (Xi.rows() != u.size() || Xi.cols() != C.dim())
    throw std::invalid_argument("block_support: dimension mismatch");
  return C.h(Xi.transpose() * u);
}

double ellipsoid_polar_radial(const Eigen::VectorXd& x, double alpha, const Eigen::VectorXd& u) {
  if (!(alpha > 0.0)) throw std::invalid_argument("ellipsoid_polar_radial: alpha must be > 0");
  const double un = u.norm();
  if (un == 0.0) throw std::invalid_argument("ellipsoid_polar_radial: u must be nonzero");
  return 1.0 / std::hypot(x.dot(u), alpha * un);
}

StarBody ball_star(int n, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball_star: radius must be > 0");
  return StarBody(n, [radius](const Eigen::VectorXd&) { return radius; }, "ball");
}

DensityFamily DensityFamily::iid(const Density& f, int blocks, int width) {
  DensityFamily F;
  F.per_block.assign(static_cast<std::size_t>(blocks),
                     std::vector<Density>(static_cast<std::size_t>(width), f));
  return F;
}

BlockSampleMatrix draw_blocks(const DensityFamily& F, RngStream& rng) {
  if (F.per_block.empty()) throw std::invalid_argument("draw_blocks: empty family");
  const int n = F.per_block.front().front().dim();
  BlockSampleMatrix X;
  X.seed = rng.master_seed();
  int total = 0;
  for (const auto& blk : F.per_block) {
    X.offsets.push_back(total);
    X.widths.push_back(static_cast<int>(blk.size()));
    total += static_cast<int>(blk.size());
  }
  X.cols.resize(n, total);
  int c = 0;
  for (const auto& blk : F.per_block)
    for (const auto& f : blk) {
      if (f.dim() != n) throw std::invalid_argument("draw_blocks: density dimension mismatch");
      X.cols.col(c++) = f.sample(rng);
    }
  return X;
}

double generalized_ball_gauge(const GeneralizedBall& B, const std::vector<Eigen::VectorXd>& parts) {
  if (parts.size() != B.bodies.size())
    throw std::invalid_argument("generalized_ball_gauge: block count mismatch");
  const std::size_t N = B.bodies.size();
  if (std::isinf(B.p)) {
    double mx = 0.0;
    for (std::size_t i = 0; i < N; ++i) mx = std::max(mx, B.bodies[i].h(parts[i]));
    return mx;
  }
  if (B.p == 0.0) {
    double logsum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double h = B.bodies[i].h(parts[i]);
      if (h == 0.0) return 0.0;
      logsum += std::log(h);
    }
    return std::exp(logsum / static_cast<double>(N));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double h = B.bodies[i].h(parts[i]);
    if (h == 0.0 && B.p < 0.0) return 0.0;  // h^p = +inf forces gauge 0
    s += std::pow(h, B.p);
  }
  return std::pow(s, 1.0 / B.p);
}

double generalized_ball_gauge_at(const GeneralizedBall& B, const BlockSampleMatrix& X,
                                 const Eigen::VectorXd& u) {
  std::vector<Eigen::VectorXd> parts;
  parts.reserve(B.bodies.size());
  for (int i = 0; i < X.blocks(); ++i) parts.push_back(X.block(i).transpose() * u);
  return generalized_ball_gauge(B, parts);
}

bool polar_membership(const Eigen::VectorXd& u, const BlockSampleMatrix& X,
                      const std::vector<SupportBody>& C, const Eigen::VectorXd& scales) {
  if (static_cast<int>(C.size()) != X.blocks() || scales.size() != X.blocks())
    throw std::invalid_argument("polar_membership: block count mismatch");
  for (int i = 0; i < X.blocks(); ++i) {
    if (!(scales[i] > 0.0)) throw std::invalid_argument("polar_membership: scales must be > 0");
    if (scales[i] * C[static_cast<std::size_t>(i)].h(X.block(i).transpose() * u) > 1.0)
      return false;
  }
  return true;
}

}  // namespace starvol
