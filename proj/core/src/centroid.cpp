#include "starvol/centroid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "starvol/estimate.hpp"

namespace starvol {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RadialValue dual_centroid_radial(const Density& f, const SupportBody& C, double p,
                                 const Eigen::VectorXd& u, EvalMode mode, std::size_t budget,
                                 RngStream* rng) {
  if (!(p >= -1.0)) throw std::invalid_argument("dual_centroid_radial: requires p >= -1");
  const double un = u.norm();
  if (un == 0.0) throw std::invalid_argument("dual_centroid_radial: u must be nonzero");

  if (mode == EvalMode::closed_form) {
    if (C.dim() != 1)
      throw std::invalid_argument(
          "dual_centroid_radial: closed-form evaluation needs a one-dimensional kernel body");
    const double c = C.h(Eigen::VectorXd::Ones(1));  // h(C, t) = c |t|
    const Density1D m = marginal_1d(f, u / un);
    RadialValue out;
    if (p == 0.0) {
      // log rho = -E log(c |T|); the log singularity at 0 is integrable
      const double elog = m.expect([](double t) { return std::log(std::abs(t)); }, {0.0});
      out.value = std::exp(-(std::log(c) + elog)) / un;
      return out;
    }
    if (p <= -1.0)
      throw std::invalid_argument("dual_centroid_radial: closed form needs p > -1 (moment diverges at p = -1)");
    const double mom = m.abs_moment(p);  // E |T|^p
    const double rho_pow = std::pow(c, p) * mom;  // rho^{-p} at the unit direction
    if (p > 0.0 && !std::isfinite(rho_pow)) {
      out.value = 0.0;
      return out;
    }
    out.value = std::pow(rho_pow, -1.0 / p) / un;
    return out;
  }

  if (rng == nullptr || budget == 0)
    throw std::invalid_argument("dual_centroid_radial: monte_carlo mode needs rng and budget");
  const int m = C.dim();
  const Eigen::VectorXd uu = u / un;
  Accumulator acc;
  Eigen::VectorXd dots(m);
  for (std::size_t k = 0; k < budget; ++k) {
    for (int j = 0; j < m; ++j) dots[j] = f.sample(*rng).dot(uu);
    const double h = C.h(dots);
    if (p == 0.0) {
      acc.add(std::log(h));
    } else {
      acc.add(std::pow(h, p));
    }
  }
  RadialValue out;
  if (p == 0.0) {
    out.value = std::exp(-acc.mean()) / un;
    out.std_error = out.value * acc.std_error();  // delta method for exp(-mean)
    return out;
  }
  const double mean = acc.mean();
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    // p > 0 with a diverging moment: the body degenerates to rho = 0 there
    out.value = (p > 0.0) ? 0.0 : kInf;
    out.std_error = kInf;
    return out;
  }
  out.value = std::pow(mean, -1.0 / p) / un;
  out.std_error = std::abs(-1.0 / p) * std::pow(mean, -1.0 / p - 1.0) * acc.std_error() / un;
  return out;
}

StarBody empirical_dual_centroid(const BlockSampleMatrix& X, const std::vector<SupportBody>& C,
                                 double p) {
  if (static_cast<int>(C.size()) != X.blocks())
    throw std::invalid_argument("empirical_dual_centroid: block count mismatch");
  for (int i = 0; i < X.blocks(); ++i)
    if (C[static_cast<std::size_t>(i)].dim() != X.widths[static_cast<std::size_t>(i)])
      throw std::invalid_argument("empirical_dual_centroid: body/block dimension mismatch at block " +
                                  std::to_string(i));
  const double N = static_cast<double>(X.blocks());
  auto bodies = C;
  auto sample = X;
  if (p == 0.0) {
    return StarBody(
        X.n(),
        [sample, bodies](const Eigen::VectorXd& u) {
          double logsum = 0.0;
          for (int i = 0; i < sample.blocks(); ++i) {
            const double h = bodies[static_cast<std::size_t>(i)].h(sample.block(i).transpose() * u);
            if (h == 0.0) return kInf;
            logsum += std::log(h);
          }
          return std::exp(-logsum / static_cast<double>(sample.blocks()));
        },
        "empirical-dual-centroid(p=0)");
  }
  return StarBody(
      X.n(),
      [sample, bodies, p, N](const Eigen::VectorXd& u) {
        double s = 0.0;
        for (int i = 0; i < sample.blocks(); ++i) {
          const double h = bodies[static_cast<std::size_t>(i)].h(sample.block(i).transpose() * u);
          if (h == 0.0) {
            if (p < 0.0) return kInf;  // one infinite summand dominates
            continue;                  // h^p = 0 for p > 0
          }
          s += std::pow(h, p);
        }
        if (s == 0.0) return p > 0.0 ? kInf : 0.0;
        return std::pow(s / N, -1.0 / p);
      },
      "empirical-dual-centroid");
}

double classical_centroid_support(const Eigen::MatrixXd& cols, double p, const Eigen::VectorXd& u) {
  if (std::isinf(p)) {
    double mx = 0.0;
    for (int i = 0; i < cols.cols(); ++i) mx = std::max(mx, std::abs(cols.col(i).dot(u)));
    return mx;
  }
  if (!(p >= 1.0))
    throw std::invalid_argument("classical_centroid_support: p >= 1 required (not a support function below)");
  double s = 0.0;
  for (int i = 0; i < cols.cols(); ++i) s += std::pow(std::abs(cols.col(i).dot(u)), p);
  return std::pow(s / static_cast<double>(cols.cols()), 1.0 / p);
}

RadialValue intersection_radial(const Density& f, const Eigen::VectorXd& u) {
  if (f.dim() < 2 || f.dim() > 3)
    throw std::invalid_argument("intersection_radial: supported for n in {2,3}");
  const double un = u.norm();
  if (un == 0.0) throw std::invalid_argument("intersection_radial: u must be nonzero");
  RadialValue out;
  out.value = marginal_1d(f, u / un).pdf(0.0);
  return out;
}

RadialValue lp_intersection_radial(const Density& f, double p, double alpha,
                                   const Eigen::VectorXd& u, EvalMode mode, std::size_t budget,
                                   RngStream* rng) {
  if (!(p >= -1.0) || !(p < 0.0))
    throw std::invalid_argument("lp_intersection_radial: requires p in [-1, 0)");
  if (!(alpha > 0.0))
    throw std::invalid_argument("lp_intersection_radial: alpha must be > 0 (alpha = 0 is the plain intersection body)");
  const double un = u.norm();
  if (un == 0.0) throw std::invalid_argument("lp_intersection_radial: u must be nonzero");
  const double q = -p;  // |p|
  RadialValue out;
  if (mode == EvalMode::closed_form) {
    const Density1D m = marginal_1d(f, u / un);
    const double rho_pow =
        m.expect([q, alpha](double t) { return std::pow(t * t + alpha * alpha, -0.5 * q); });
    out.value = std::pow(rho_pow, 1.0 / q) / un;
    return out;
  }
  if (rng == nullptr || budget == 0)
    throw std::invalid_argument("lp_intersection_radial: monte_carlo mode needs rng and budget");
  const Eigen::VectorXd uu = u / un;
  Accumulator acc;
  for (std::size_t k = 0; k < budget; ++k) {
    const double d = f.sample(*rng).dot(uu);
    acc.add(std::pow(d * d + alpha * alpha, -0.5 * q));
  }
  out.value = std::pow(acc.mean(), 1.0 / q) / un;
  out.std_error = (1.0 / q) * std::pow(acc.mean(), 1.0 / q - 1.0) * acc.std_error() / un;
  return out;
}

double empirical_lp_intersection(const Eigen::MatrixXd& cols, double p, double alpha,
                                 const Eigen::VectorXd& u) {
  if (!(p >= -1.0) || !(p < 0.0))
    throw std::invalid_argument("empirical_lp_intersection: requires p in [-1, 0)");
  if (!(alpha > 0.0)) throw std::invalid_argument("empirical_lp_intersection: alpha must be > 0");
  const double q = -p;
  double s = 0.0;
  for (int i = 0; i < cols.cols(); ++i) {
    const double r = ellipsoid_polar_radial(cols.col(i), alpha, u);
    s += std::pow(r, q);
  }
  return std::pow(s / static_cast<double>(cols.cols()), 1.0 / q);
}

StarBody empirical_lp_intersection_body(const Eigen::MatrixXd& cols, double p, double alpha) {
  Eigen::MatrixXd copy = cols;
  return StarBody(
      static_cast<int>(cols.rows()),
      [copy, p, alpha](const Eigen::VectorXd& u) {
        return empirical_lp_intersection(copy, p, alpha, u);
      },
      "empirical-lp-intersection");
}

}  // namespace starvol
