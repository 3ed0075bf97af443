#include "starvol/volume.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "starvol/special.hpp"
#include "starvol/stable.hpp"

namespace starvol {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Estimate volume_radial_counted(const StarBody& K, const SphereGrid& grid,
                               std::size_t* dropped_nodes) {
  if (grid.dim != K.dim()) throw std::invalid_argument("volume_radial: grid/body dimension mismatch");
  const int n = K.dim();
  const double wn = unit_ball_volume(n);
  double sum = 0.0, sum2 = 0.0;
  std::size_t dropped = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double rho = K.rho_unit(grid.nodes[j]);
    if (!std::isfinite(rho)) {
      ++dropped;
      continue;
    }
    const double v = std::pow(rho, n);
    sum += grid.weights[j] * v;
    sum2 += grid.weights[j] * v * v;
  }
  if (dropped_nodes != nullptr) *dropped_nodes = dropped;
  if (dropped > grid.size() / 100)
    throw std::runtime_error("volume_radial: " + std::to_string(dropped) + " of " +
                             std::to_string(grid.size()) +
                             " nodes had infinite radial values; body looks unbounded");
  const double value = wn * sum;
  if (grid.deterministic) return Estimate::deterministic(value, grid.size(), "volume_radial");
  // equal-weight Monte Carlo grid: honest standard error
  const double m = sum;  // weights sum to one
  const double var = std::max(0.0, sum2 - m * m);
  const double se = wn * std::sqrt(var / static_cast<double>(grid.size()));
  return Estimate::monte_carlo(value, se, grid.size(), 0, "volume_radial");
}

Estimate volume_radial(const StarBody& K, const SphereGrid& grid) {
  return volume_radial_counted(K, grid, nullptr);
}

Estimate volume_gaussian(const StarBody& K, double s, std::size_t budget, RngStream& rng) {
  const int n = K.dim();
  if (!(s > 0.0) || !(s < static_cast<double>(n)))
    throw std::invalid_argument("volume_gaussian: requires 0 < s < n");
  if (budget == 0) throw std::invalid_argument("volume_gaussian: budget must be > 0");
  Accumulator acc;
  for (std::size_t k = 0; k < budget; ++k) {
    const Eigen::VectorXd xi = draw_gaussian(n, rng);
    const double rho = K.rho_unit(xi / xi.norm());
    acc.add(std::isfinite(rho) ? std::pow(rho, s) : 0.0);
  }
  return Estimate::monte_carlo(acc.mean(), acc.std_error(), budget, rng.stream_index(),
                               "volume_gaussian");
}

namespace {

/// Lagrange weights at h = 0 for nodes h_l = 1/l, l in {2,4,8,16}.
std::array<double, 4> richardson_weights() {
  const std::array<double, 4> x{0.5, 0.25, 0.125, 0.0625};
  std::array<double, 4> w{};
  for (int i = 0; i < 4; ++i) {
    double num = 1.0, den = 1.0;
    for (int k = 0; k < 4; ++k) {
      if (k == i) continue;
      num *= -x[static_cast<std::size_t>(k)];
      den *= x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(k)];
    }
    w[static_cast<std::size_t>(i)] = num / den;
  }
  return w;
}

}  // namespace

Estimate volume_gaussian_extrapolated(const StarBody& K, std::size_t budget, RngStream& rng) {
  const int n = K.dim();
  if (budget == 0) throw std::invalid_argument("volume_gaussian_extrapolated: budget must be > 0");
  const auto w = richardson_weights();
  const std::array<double, 4> svals{n - 0.5, n - 0.25, n - 0.125, n - 0.0625};
  Accumulator acc;
  for (std::size_t k = 0; k < budget; ++k) {
    const Eigen::VectorXd xi = draw_gaussian(n, rng);
    const double rho = K.rho_unit(xi / xi.norm());
    if (!std::isfinite(rho)) {
      acc.add(0.0);
      continue;
    }
    double z = 0.0;
    for (int i = 0; i < 4; ++i) z += w[static_cast<std::size_t>(i)] * std::pow(rho, svals[static_cast<std::size_t>(i)]);
    acc.add(z);
  }
  const double wn = unit_ball_volume(n);
  return Estimate::monte_carlo(wn * acc.mean(), wn * acc.std_error(), budget, rng.stream_index(),
                               "volume_gaussian_extrapolated");
}

Estimate volume_exponential(const StarBody& K, double p, const SphereGrid& grid) {
  if (!(p > 0.0)) throw std::invalid_argument("volume_exponential: p must be > 0");
  // the radial integral per direction is rho^n Gamma(n/p)/p, and
  // c_{n,p} * n omega_n * Gamma(n/p)/p = omega_n, so this is the radial formula
  Estimate e = volume_radial(K, grid);
  e.method = "volume_exponential_quadrature";
  return e;
}

Estimate volume_exponential_mc(const StarBody& K, double p, std::size_t budget, RngStream& rng) {
  if (!(p > 0.0)) throw std::invalid_argument("volume_exponential_mc: p must be > 0");
  if (budget == 0) throw std::invalid_argument("volume_exponential_mc: budget must be > 0");
  const int n = K.dim();
  // pilot scale: sigma above sup rho over sampled directions keeps the
  // importance weight exp((r/sigma)^p - (r/rho)^p) bounded by one
  double rho_max = 0.0;
  RngStream pilot = rng.derive(0x9d1lu);
  for (int j = 0; j < 128; ++j) {
    const double r = K.rho_unit(draw_sphere(n, pilot));
    if (std::isfinite(r)) rho_max = std::max(rho_max, r);
  }
  if (!(rho_max > 0.0)) throw std::runtime_error("volume_exponential_mc: body has empty interior?");
  const double sigma = 1.25 * rho_max;
  const double shape = static_cast<double>(n) / p;
  Accumulator acc;
  for (std::size_t k = 0; k < budget; ++k) {
    const Eigen::VectorXd u = draw_sphere(n, rng);
    const double r = sigma * std::pow(rng.gamma(shape), 1.0 / p);
    const double rho = K.rho_unit(u);
    double val = 0.0;
    if (std::isfinite(rho) && rho > 0.0) {
      const double expo = std::pow(r / sigma, p) - std::pow(r / rho, p);
      val = std::exp(expo);
    }
    acc.add(val);
  }
  // |K| = c_{n,p} * (n omega_n sigma^n Gamma(n/p)/p) * mean = omega_n sigma^n * mean
  const double scale = unit_ball_volume(n) * std::pow(sigma, n);
  return Estimate::monte_carlo(scale * acc.mean(), scale * acc.std_error(), budget,
                               rng.stream_index(), "volume_exponential_mc");
}

Estimate polar_volume_determinant(const Eigen::MatrixXd& X, const Eigen::VectorXd& w) {
  const int n = static_cast<int>(X.rows());
  const int N = static_cast<int>(X.cols());
  if (N < n) throw std::invalid_argument("polar_volume_determinant: needs N >= n columns");
  if (w.size() != N) throw std::invalid_argument("polar_volume_determinant: weight size mismatch");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < N; ++i) A += w[i] * X.col(i) * X.col(i).transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    throw std::runtime_error("polar_volume_determinant: singular second-moment matrix (rank " +
                             std::to_string(lu.rank()) + " < " + std::to_string(n) + ")");
  }
  const double det = lu.determinant();
  return Estimate::deterministic(unit_ball_volume(n) / std::sqrt(det), static_cast<std::size_t>(N),
                                 "polar_volume_determinant");
}

namespace {

struct RatioAccumulator {
  // self-normalized importance sampling: value = scale * mean(num)/mean(den)
  Accumulator num, den;
  double cross_sum = 0.0;  // for the covariance term
  void add(double a, double b) {
    num.add(a);
    den.add(b);
    cross_sum += a * b;
  }
  Estimate finish(double scale, std::size_t count, std::uint64_t seed,
                  const std::string& method) const {
    const double nb = num.mean(), db = den.mean();
    const double r = nb / db;
    const double m = static_cast<double>(count);
    const double cov = (cross_sum / m - nb * db) * m / std::max(1.0, m - 1.0);
    const double var_r = (num.variance() - 2.0 * r * cov + r * r * den.variance()) / (db * db);
    const double se = std::sqrt(std::max(0.0, var_r) / m);
    return Estimate::monte_carlo(scale * r, std::abs(scale) * se, count, seed, method);
  }
};

}  // namespace

Estimate nt_mixture_volume(const Eigen::MatrixXd& X, double p, const MixtureConfig& cfg,
                           RngStream& rng) {
  const int n = static_cast<int>(X.rows());
  const int N = static_cast<int>(X.cols());
  if (!(p > 0.0) || !(p < 2.0)) throw std::invalid_argument("nt_mixture_volume: p must lie in (0,2)");
  if (cfg.budget < 1000) throw std::invalid_argument("nt_mixture_volume: budget must be >= 1000");
  {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(X * X.transpose());
    if (!lu.isInvertible())
      throw std::invalid_argument("nt_mixture_volume: X must have full rank " + std::to_string(n) +
                                  " (rank " + std::to_string(lu.rank()) + ")");
  }
  const NtConstants c = nt_constants(N, n, p);
  RatioAccumulator acc;
  Eigen::MatrixXd A(n, n);
  for (std::size_t k = 0; k < cfg.budget; ++k) {
    A.setZero();
    double log_den = 0.0;
    for (int i = 0; i < N; ++i) {
      const TiltedStableDraw d = sample_tilted_weight(p, rng);
      A += d.w * X.col(i) * X.col(i).transpose();
      log_den += std::log(d.importance_weight);
    }
    // sqrt(prod w) * prod w^{-1/2} = 1, so the numerator is det^{-1/2} alone
    const double det = A.determinant();
    acc.add(det > 0.0 ? 1.0 / std::sqrt(det) : 0.0, std::exp(log_den));
  }
  return acc.finish(c.a_Nnp * std::pow(M_PI, 0.5 * n), cfg.budget, rng.stream_index(),
                    "nt_mixture_volume");
}

Estimate nt_mixture_volume_blocks(const BlockSampleMatrix& X, const std::vector<SupportBody>& C,
                                  double p, const MixtureConfig& cfg, RngStream& rng) {
  const int n = X.n();
  const int N = X.blocks();
  if (static_cast<int>(C.size()) != N)
    throw std::invalid_argument("nt_mixture_volume_blocks: block count mismatch");
  if (!(p > 0.0) || !(p < 2.0))
    throw std::invalid_argument("nt_mixture_volume_blocks: p must lie in (0,2)");
  if (cfg.budget < 1000) throw std::invalid_argument("nt_mixture_volume_blocks: budget must be >= 1000");
  const NtConstants c = nt_constants(N, n, p);
  const SphereGrid grid = sphere_quadrature(n, cfg.quad_resolution, GridMode::deterministic);
  const double wn = unit_ball_volume(n);
  // precompute h(C_i, X_i^T u) per block and node
  Eigen::MatrixXd H(N, static_cast<int>(grid.size()));
  for (int i = 0; i < N; ++i) {
    const auto Xi = X.block(i);
    for (std::size_t j = 0; j < grid.size(); ++j)
      H(i, static_cast<int>(j)) = C[static_cast<std::size_t>(i)].h(Xi.transpose() * grid.nodes[j]);
  }
  RatioAccumulator acc;
  Eigen::VectorXd w(N);
  for (std::size_t k = 0; k < cfg.budget; ++k) {
    double log_den = 0.0;
    for (int i = 0; i < N; ++i) {
      const TiltedStableDraw d = sample_tilted_weight(p, rng);
      w[i] = d.w;
      log_den += std::log(d.importance_weight);
    }
    // inner polar volume: omega_n * int h_W(u)^{-n} dsigma, h_W^2 = sum w_i h_i^2
    double inner = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double h2 = 0.0;
      for (int i = 0; i < N; ++i) h2 += w[i] * H(i, static_cast<int>(j)) * H(i, static_cast<int>(j));
      if (h2 > 0.0) inner += grid.weights[j] * std::pow(h2, -0.5 * n);
    }
    acc.add(wn * inner, std::exp(log_den));
  }
  // |Z| = a_{N,n,p} c_{n,2}^{-1} N^{n/p} E_tilted sqrt(prod w) |(X B_2^N(C_W°))°|
  const double scale = c.a_Nnp * std::tgamma(1.0 + 0.5 * n) * std::pow(static_cast<double>(N),
                                                                        static_cast<double>(n) / p);
  return acc.finish(scale, cfg.budget, rng.stream_index(), "nt_mixture_volume_blocks");
}

Estimate gaussian_measure_polar(const BlockSampleMatrix& X, const std::vector<SupportBody>& C,
                                const Eigen::VectorXd& scales, std::size_t budget, RngStream& rng) {
  if (budget == 0) throw std::invalid_argument("gaussian_measure_polar: budget must be > 0");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < budget; ++k) {
    if (polar_membership(draw_gaussian(X.n(), rng), X, C, scales)) ++hits;
  }
  const double m = static_cast<double>(budget);
  const double phat = static_cast<double>(hits) / m;
  const double se = std::sqrt(phat * (1.0 - phat) / m);
  return Estimate::monte_carlo(phat, se, budget, rng.stream_index(), "gaussian_measure_polar");
}

namespace {

IndicatorRepReport finish_indicator_report(double direct, const Accumulator& acc,
                                           std::size_t budget) {
  IndicatorRepReport r;
  r.direct = direct;
  r.mc_value = acc.mean();
  r.mc_std_error = acc.std_error();
  r.budget = budget;
  r.z = r.mc_std_error > 0.0 ? std::abs(r.mc_value - direct) / r.mc_std_error : kInf;
  r.consistent = r.z <= 4.0;
  r.inconclusive = 4.0 * r.mc_std_error > 0.5 * std::abs(direct);
  if (r.inconclusive) r.consistent = false;
  return r;
}

}  // namespace

IndicatorRepReport indicator_rep_check_p0(const BlockSampleMatrix& X,
                                          const std::vector<SupportBody>& C, double s,
                                          const Eigen::VectorXd& u, std::size_t budget,
                                          RngStream& rng) {
  const int N = X.blocks();
  if (!(s > 0.0)) throw std::invalid_argument("indicator_rep_check_p0: s must be > 0");
  if (budget == 0) throw std::invalid_argument("indicator_rep_check_p0: budget must be > 0");
  // direct value: prod_i h_i^{-s/N}
  std::vector<double> a(static_cast<std::size_t>(N));
  double direct = 1.0;
  for (int i = 0; i < N; ++i) {
    const double h = C[static_cast<std::size_t>(i)].h(X.block(i).transpose() * u);
    if (!(h > 0.0)) throw std::invalid_argument("indicator_rep_check_p0: h vanishes at u");
    a[static_cast<std::size_t>(i)] = std::pow(h, -s / static_cast<double>(N));
    direct *= a[static_cast<std::size_t>(i)];
  }
  // exponential proposals matched to the box [0, a_i]
  Accumulator acc;
  Eigen::VectorXd t(N), scl(N);
  for (std::size_t k = 0; k < budget; ++k) {
    double logw = 0.0;
    for (int i = 0; i < N; ++i) {
      const double lam = 1.0 / a[static_cast<std::size_t>(i)];
      t[i] = rng.exponential() / lam;
      logw += lam * t[i] - std::log(lam);
      scl[i] = std::pow(t[i], static_cast<double>(N) / s);
    }
    const bool member = polar_membership(u, X, C, scl);
    acc.add(member ? std::exp(logw) : 0.0);
  }
  return finish_indicator_report(direct, acc, budget);
}

IndicatorRepReport indicator_rep_check_neg(const BlockSampleMatrix& X,
                                           const std::vector<SupportBody>& C, double p, int k,
                                           const Eigen::VectorXd& u, std::size_t budget,
                                           RngStream& rng) {
  const int N = X.blocks();
  if (!(p >= -1.0) || !(p < 0.0))
    throw std::invalid_argument("indicator_rep_check_neg: p must lie in [-1, 0)");
  if (k < 1 || k > 6) throw std::invalid_argument("indicator_rep_check_neg: k must lie in 1..6");
  const double q = -p;
  std::vector<double> h(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    h[static_cast<std::size_t>(i)] = C[static_cast<std::size_t>(i)].h(X.block(i).transpose() * u);
    if (!(h[static_cast<std::size_t>(i)] > 0.0))
      throw std::invalid_argument("indicator_rep_check_neg: h vanishes at u");
  }
  double direct = 0.0;
  for (int i = 0; i < N; ++i) direct += std::pow(h[static_cast<std::size_t>(i)], -q);
  direct = std::pow(direct / static_cast<double>(N), static_cast<double>(k));

  // enumerate compositions of k into N nonnegative parts
  std::vector<std::vector<int>> comps;
  std::vector<int> cur(static_cast<std::size_t>(N), 0);
  std::function<void(int, int)> rec = [&](int idx, int rem) {
    if (idx == N - 1) {
      cur[static_cast<std::size_t>(idx)] = rem;
      comps.push_back(cur);
      return;
    }
    for (int v = 0; v <= rem; ++v) {
      cur[static_cast<std::size_t>(idx)] = v;
      rec(idx + 1, rem - v);
    }
  };
  rec(0, k);

  auto log_factorial = [](int m) { return std::lgamma(static_cast<double>(m) + 1.0); };
  const std::size_t per_term = std::max<std::size_t>(budget / comps.size(), 64);

  std::vector<Accumulator> term_acc(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const auto& kk = comps[c];
    double log_coef = log_factorial(k);
    std::vector<int> active;
    for (int i = 0; i < N; ++i) {
      log_coef -= log_factorial(kk[static_cast<std::size_t>(i)]);
      if (kk[static_cast<std::size_t>(i)] > 0) active.push_back(i);
    }
    const double coef = std::exp(log_coef);
    // per-coordinate exponential proposal on the active blocks
    Eigen::VectorXd scl = Eigen::VectorXd::Constant(N, 1e-300);  // inactive blocks: no constraint
    for (std::size_t d = 0; d < per_term; ++d) {
      double logw = 0.0;
      for (int i : active) {
        const double expo = static_cast<double>(kk[static_cast<std::size_t>(i)]) * q;
        const double ai = std::pow(h[static_cast<std::size_t>(i)], -expo);
        const double lam = 1.0 / ai;
        const double ti = rng.exponential() / lam;
        logw += lam * ti - std::log(lam);
        scl[i] = std::pow(ti, 1.0 / expo);
      }
      const bool member = polar_membership(u, X, C, scl);
      term_acc[c].add(member ? coef * std::exp(logw) : 0.0);
      for (int i : active) scl[i] = 1e-300;
    }
  }
  // combine: value = N^{-k} sum_terms mean_c; draws are independent across terms
  const double nk = std::pow(static_cast<double>(N), -static_cast<double>(k));
  double mc = 0.0, var = 0.0;
  for (const auto& acc : term_acc) {
    mc += acc.mean();
    const double se = acc.std_error();
    var += se * se;
  }
  IndicatorRepReport r;
  r.direct = direct;
  r.mc_value = nk * mc;
  r.mc_std_error = nk * std::sqrt(var);
  r.budget = per_term * comps.size();
  r.z = r.mc_std_error > 0.0 ? std::abs(r.mc_value - direct) / r.mc_std_error : kInf;
  r.consistent = r.z <= 4.0;
  r.inconclusive = 4.0 * r.mc_std_error > 0.5 * std::abs(direct);
  if (r.inconclusive) r.consistent = false;
  return r;
}

}  // namespace starvol
