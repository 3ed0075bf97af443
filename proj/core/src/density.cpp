#include "starvol/density.hpp"

#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "starvol/quadrature.hpp"
#include "starvol/special.hpp"
#include "starvol/sphere_grid.hpp"

namespace starvol {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd zero_vec(int n) { return Eigen::VectorXd::Zero(n); }

/// Chord length of the axis box {|x_k| <= a_k} cut by the line t*u + s*v,
/// s in R (u, v orthonormal). Returns 0 if the line misses the box.
double box_chord(const std::vector<double>& a, const Eigen::VectorXd& u,
                 const Eigen::VectorXd& v, double t) {
  double lo = -kInf, hi = kInf;
  for (int k = 0; k < u.size(); ++k) {
    const double b = v[k], c = t * u[k];
    if (std::abs(b) < 1e-14) {
      if (std::abs(c) > a[static_cast<std::size_t>(k)]) return 0.0;
    } else {
      double l = (-a[static_cast<std::size_t>(k)] - c) / b;
      double h = (a[static_cast<std::size_t>(k)] - c) / b;
      if (l > h) std::swap(l, h);
      lo = std::max(lo, l);
      hi = std::min(hi, h);
    }
  }
  return std::max(0.0, hi - lo);
}

/// Area of the planar slice {<x,u> = t} of the axis box {|x_k| <= a_k} in R^3,
/// by Sutherland-Hodgman clipping of a large square in slice coordinates.
double box_slice_area(const std::vector<double>& a, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& v1, const Eigen::VectorXd& v2, double t) {
  const double big = 4.0 * (std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2])) + 4.0;
  std::vector<Eigen::Vector2d> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  // each |t u_k + s1 v1_k + s2 v2_k| <= a_k is two half planes in (s1, s2)
  for (int k = 0; k < 3; ++k) {
    for (double sign : {+1.0, -1.0}) {
      // sign*(t u_k + s1 v1_k + s2 v2_k) <= a_k
      const double g1 = sign * v1[k], g2 = sign * v2[k];
      const double rhs = a[static_cast<std::size_t>(k)] - sign * t * u[k];
      std::vector<Eigen::Vector2d> out;
      const std::size_t m = poly.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Vector2d& p = poly[i];
        const Eigen::Vector2d& q = poly[(i + 1) % m];
        const double fp = g1 * p.x() + g2 * p.y() - rhs;
        const double fq = g1 * q.x() + g2 * q.y() - rhs;
        if (fp <= 0) out.push_back(p);
        if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
          const double w = fp / (fp - fq);
          out.push_back(p + w * (q - p));
        }
      }
      poly.swap(out);
      if (poly.empty()) return 0.0;
    }
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Eigen::Vector2d& p = poly[i];
    const Eigen::Vector2d& q = poly[(i + 1) % poly.size()];
    area2 += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::abs(area2);
}

/// Orthonormal basis of u^perp (u unit).
std::vector<Eigen::VectorXd> complement_basis(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  std::vector<Eigen::VectorXd> basis;
  for (int axis = 0; axis < n && static_cast<int>(basis.size()) < n - 1; ++axis) {
    Eigen::VectorXd w = Eigen::VectorXd::Unit(n, axis);
    w -= u.dot(w) * u;
    for (const auto& b : basis) w -= b.dot(w) * b;
    const double nrm = w.norm();
    if (nrm < 1e-9) continue;
    basis.push_back(w / nrm);
  }
  if (static_cast<int>(basis.size()) != n - 1)
    throw std::runtime_error("complement_basis: degenerate direction");
  return basis;
}

Eigen::VectorXd sample_in_ball(int n, double radius, RngStream& rng) {
  Eigen::VectorXd x = draw_sphere(n, rng);
  return radius * std::pow(rng.uniform01(), 1.0 / n) * x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Density1D

double Density1D::mass() const {
  return integrate(pdf, lo, hi, breakpoints);
}

double Density1D::abs_moment(double p) const {
  if (!(p > -1.0))
    throw std::invalid_argument("Density1D::abs_moment: requires p > -1, got p=" + std::to_string(p));
  std::vector<double> br = breakpoints;
  br.push_back(0.0);
  const auto& f = pdf;
  if (p == 0.0) return integrate(f, lo, hi, br);
  return integrate([&f, p](double t) { return std::pow(std::abs(t), p) * f(t); }, lo, hi, br);
}

double Density1D::expect(const std::function<double(double)>& g,
                         std::vector<double> extra_breaks) const {
  std::vector<double> br = breakpoints;
  br.insert(br.end(), extra_breaks.begin(), extra_breaks.end());
  const auto& f = pdf;
  return integrate([&f, &g](double t) { return g(t) * f(t); }, lo, hi, br);
}

double Density1D::cdf(double t) const {
  if (t <= lo) return 0.0;
  if (t >= hi) return 1.0;
  return integrate(pdf, lo, t, breakpoints);
}

// ---------------------------------------------------------------------------
// DensityImpl hierarchy

class DensityImpl {
 public:
  virtual ~DensityImpl() = default;
  virtual int dim() const = 0;
  virtual double eval(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd sample(RngStream& rng) const = 0;
  virtual double sup_norm() const = 0;
  virtual double support_radius() const = 0;
  virtual std::string family() const = 0;
  virtual Density1D marginal(const Eigen::VectorXd& u) const = 0;
  virtual double level_set_volume(double t) const = 0;
  virtual bool radial() const { return false; }
  virtual bool radial_decreasing() const { return false; }
  virtual Density rearranged() const = 0;
};

int Density::dim() const { return impl_->dim(); }
double Density::operator()(const Eigen::VectorXd& x) const { return impl_->eval(x); }
Eigen::VectorXd Density::sample(RngStream& rng) const { return impl_->sample(rng); }
double Density::sup_norm() const { return impl_->sup_norm(); }
double Density::support_radius() const { return impl_->support_radius(); }
std::string Density::family() const { return impl_->family(); }
Density1D Density::marginal(const Eigen::VectorXd& u) const {
  if (std::abs(u.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("Density::marginal: direction must be a unit vector");
  return impl_->marginal(u);
}
double Density::level_set_volume(double t) const { return impl_->level_set_volume(t); }
bool Density::is_radial() const { return impl_->radial(); }
bool Density::is_radial_decreasing() const { return impl_->radial_decreasing(); }

namespace {

// -- uniform ball (possibly shifted) ----------------------------------------

class UniformBallImpl final : public DensityImpl {
 public:
  UniformBallImpl(int n, double radius, Eigen::VectorXd center)
      : n_(n), r_(radius), c_(std::move(center)), value_(1.0 / (unit_ball_volume(n) * std::pow(radius, n))) {
    if (n < 1) throw std::invalid_argument("uniform_ball: dimension must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("uniform_ball: radius must be > 0");
    if (c_.size() == 0) c_ = zero_vec(n);
    if (c_.size() != n) throw std::invalid_argument("uniform_ball: center has wrong dimension");
  }
  int dim() const override { return n_; }
  double eval(const Eigen::VectorXd& x) const override {
    return (x - c_).norm() <= r_ ? value_ : 0.0;
  }
  Eigen::VectorXd sample(RngStream& rng) const override { return c_ + sample_in_ball(n_, r_, rng); }
  double sup_norm() const override { return value_; }
  double support_radius() const override { return c_.norm() + r_; }
  std::string family() const override { return c_.norm() == 0.0 ? "uniform-ball" : "shifted-uniform-ball"; }
  Density1D marginal(const Eigen::VectorXd& u) const override {
    const double mu = c_.dot(u);
    const double coef = (n_ == 1) ? value_
                                  : unit_ball_volume(n_ - 1) * value_;
    const double ex = 0.5 * (n_ - 1);
    Density1D m;
    m.lo = mu - r_;
    m.hi = mu + r_;
    m.breakpoints = {mu};
    const double r = r_;
    m.pdf = [coef, ex, mu, r](double t) {
      const double q = r * r - (t - mu) * (t - mu);
      if (q <= 0.0) return 0.0;
      return coef * std::pow(q, ex);
    };
    return m;
  }
  double level_set_volume(double t) const override {
    return t < value_ ? unit_ball_volume(n_) * std::pow(r_, n_) : 0.0;
  }
  bool radial() const override { return c_.norm() == 0.0; }
  bool radial_decreasing() const override { return radial(); }
  Density rearranged() const override { return uniform_ball(n_, r_); }

 private:
  int n_;
  double r_;
  Eigen::VectorXd c_;
  double value_;
};

// -- uniform box -------------------------------------------------------------

class UniformBoxImpl final : public DensityImpl {
 public:
  UniformBoxImpl(int n, std::vector<double> halfwidth) : n_(n), a_(std::move(halfwidth)) {
    if (n < 1 || n > 3) throw std::invalid_argument("uniform_box: dimension must be 1, 2 or 3");
    if (a_.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("uniform_box: halfwidth list must have n entries");
    double vol = 1.0;
    for (double a : a_) {
      if (!(a > 0.0)) throw std::invalid_argument("uniform_box: halfwidth must be > 0");
      vol *= 2.0 * a;
    }
    vol_ = vol;
    value_ = 1.0 / vol;
  }
  int dim() const override { return n_; }
  double eval(const Eigen::VectorXd& x) const override {
    for (int k = 0; k < n_; ++k)
      if (std::abs(x[k]) > a_[static_cast<std::size_t>(k)]) return 0.0;
    return value_;
  }
  Eigen::VectorXd sample(RngStream& rng) const override {
    Eigen::VectorXd x(n_);
    for (int k = 0; k < n_; ++k)
      x[k] = rng.uniform(-a_[static_cast<std::size_t>(k)], a_[static_cast<std::size_t>(k)]);
    return x;
  }
  double sup_norm() const override { return value_; }
  double support_radius() const override {
    double s = 0.0;
    for (double a : a_) s += a * a;
    return std::sqrt(s);
  }
  std::string family() const override { return "uniform-cube"; }
  Density1D marginal(const Eigen::VectorXd& u) const override {
    Density1D m;
    double h = 0.0;
    for (int k = 0; k < n_; ++k) h += a_[static_cast<std::size_t>(k)] * std::abs(u[k]);
    m.lo = -h;
    m.hi = h;
    // vertex projections are the kinks of the (piecewise polynomial) marginal
    for (int mask = 0; mask < (1 << n_); ++mask) {
      double t = 0.0;
      for (int k = 0; k < n_; ++k)
        t += ((mask >> k) & 1 ? a_[static_cast<std::size_t>(k)] : -a_[static_cast<std::size_t>(k)]) * u[k];
      m.breakpoints.push_back(t);
    }
    const auto a = a_;
    const double value = value_;
    const int n = n_;
    if (n == 1) {
      const double s = (u[0] > 0 ? 1.0 : -1.0);
      m.pdf = [a, value, s](double t) { return std::abs(t) <= a[0] ? value : 0.0; };
      (void)s;
      return m;
    }
    auto basis = complement_basis(u);
    if (n == 2) {
      const Eigen::VectorXd v = basis[0];
      const Eigen::VectorXd uu = u;
      m.pdf = [a, value, uu, v](double t) { return value * box_chord(a, uu, v, t); };
    } else {
      const Eigen::VectorXd v1 = basis[0], v2 = basis[1];
      const Eigen::VectorXd uu = u;
      m.pdf = [a, value, uu, v1, v2](double t) { return value * box_slice_area(a, uu, v1, v2, t); };
    }
    return m;
  }
  double level_set_volume(double t) const override { return t < value_ ? vol_ : 0.0; }
  Density rearranged() const override {
    return uniform_ball(n_, std::pow(vol_ / unit_ball_volume(n_), 1.0 / n_));
  }

 private:
  int n_;
  std::vector<double> a_;
  double vol_;
  double value_;
};

// -- uniform annulus ---------------------------------------------------------

class UniformAnnulusImpl final : public DensityImpl {
 public:
  UniformAnnulusImpl(int n, double r_inner, double r_outer) : n_(n), r1_(r_inner), r2_(r_outer) {
    if (n < 1) throw std::invalid_argument("uniform_annulus: dimension must be >= 1");
    if (!(r_inner >= 0.0) || !(r_outer > r_inner))
      throw std::invalid_argument("uniform_annulus: requires 0 <= r_inner < r_outer");
    vol_ = unit_ball_volume(n) * (std::pow(r2_, n) - std::pow(r1_, n));
    value_ = 1.0 / vol_;
  }
  int dim() const override { return n_; }
  double eval(const Eigen::VectorXd& x) const override {
    const double r = x.norm();
    return (r >= r1_ && r <= r2_) ? value_ : 0.0;
  }
  Eigen::VectorXd sample(RngStream& rng) const override {
    const double rn = std::pow(r1_, n_) + rng.uniform01() * (std::pow(r2_, n_) - std::pow(r1_, n_));
    return std::pow(rn, 1.0 / n_) * draw_sphere(n_, rng);
  }
  double sup_norm() const override { return value_; }
  double support_radius() const override { return r2_; }
  std::string family() const override { return "uniform-annulus"; }
  Density1D marginal(const Eigen::VectorXd&) const override {
    Density1D m;
    m.lo = -r2_;
    m.hi = r2_;
    m.breakpoints = {-r1_, 0.0, r1_};
    const double coef = (n_ == 1) ? value_ : unit_ball_volume(n_ - 1) * value_;
    const double ex = 0.5 * (n_ - 1);
    const double r1 = r1_, r2 = r2_;
    m.pdf = [coef, ex, r1, r2](double t) {
      const double q2 = r2 * r2 - t * t;
      if (q2 <= 0.0) return 0.0;
      double v = std::pow(q2, ex);
      const double q1 = r1 * r1 - t * t;
      if (q1 > 0.0) v -= std::pow(q1, ex);
      return coef * v;
    };
    return m;
  }
  double level_set_volume(double t) const override { return t < value_ ? vol_ : 0.0; }
  bool radial() const override { return true; }
  bool radial_decreasing() const override { return r1_ == 0.0; }
  Density rearranged() const override {
    return uniform_ball(n_, std::pow(std::pow(r2_, n_) - std::pow(r1_, n_), 1.0 / n_));
  }

 private:
  int n_;
  double r1_, r2_;
  double vol_;
  double value_;
};

// -- (truncated) Gaussian ----------------------------------------------------

class TruncatedGaussianImpl final : public DensityImpl {
 public:
  TruncatedGaussianImpl(int n, double sigma, double cutoff) : n_(n), sigma_(sigma), k_(cutoff) {
    if (n < 1) throw std::invalid_argument("truncated_gaussian: dimension must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("truncated_gaussian: sigma must be > 0");
    if (!(cutoff > 0.0)) throw std::invalid_argument("truncated_gaussian: cutoff must be > 0");
    mass_ = std::isfinite(k_) ? gsl_sf_gamma_inc_P(0.5 * n_, 0.5 * (k_ / sigma_) * (k_ / sigma_)) : 1.0;
    if (!(mass_ > 0.0)) throw std::invalid_argument("truncated_gaussian: truncation captures no mass");
    norm_ = std::pow(2.0 * M_PI * sigma_ * sigma_, -0.5 * n_) / mass_;
  }
  int dim() const override { return n_; }
  double eval(const Eigen::VectorXd& x) const override {
    const double r = x.norm();
    if (r > k_) return 0.0;
    return norm_ * std::exp(-0.5 * r * r / (sigma_ * sigma_));
  }
  Eigen::VectorXd sample(RngStream& rng) const override {
    for (;;) {
      Eigen::VectorXd x = sigma_ * draw_gaussian(n_, rng);
      if (x.norm() <= k_) return x;
    }
  }
  double sup_norm() const override { return norm_; }
  double support_radius() const override { return k_; }
  std::string family() const override { return "truncated-gaussian"; }
  Density1D marginal(const Eigen::VectorXd&) const override {
    Density1D m;
    const double reach = std::isfinite(k_) ? k_ : 12.0 * sigma_;
    m.lo = -reach;
    m.hi = reach;
    m.breakpoints = {0.0};
    const double s = sigma_, k = k_, mass = mass_;
    const int n = n_;
    if (n == 1) {
      m.pdf = [s, k, mass](double t) {
        if (std::abs(t) > k) return 0.0;
        return std::exp(-0.5 * t * t / (s * s)) / (std::sqrt(2.0 * M_PI) * s * mass);
      };
    } else if (n == 2) {
      m.pdf = [s, k, mass](double t) {
        if (std::abs(t) > k) return 0.0;
        const double reach2 = std::isfinite(k) ? std::sqrt(k * k - t * t) : kInf;
        const double range = std::isfinite(reach2) ? std::erf(reach2 / (s * std::sqrt(2.0))) : 1.0;
        return std::exp(-0.5 * t * t / (s * s)) * range / (std::sqrt(2.0 * M_PI) * s * mass);
      };
    } else if (n == 3) {
      m.pdf = [s, k, mass](double t) {
        if (std::abs(t) > k) return 0.0;
        const double tail = std::isfinite(k) ? std::exp(-0.5 * k * k / (s * s)) : 0.0;
        return (std::exp(-0.5 * t * t / (s * s)) - tail) / (std::sqrt(2.0 * M_PI) * s * mass);
      };
    } else {
      throw std::invalid_argument("truncated_gaussian: closed-form marginal limited to n <= 3");
    }
    return m;
  }
  double level_set_volume(double t) const override {
    // {f > t} is the ball of radius min(k, sigma sqrt(-2 log(t / norm)))
    if (t >= norm_) return 0.0;
    double r = sigma_ * std::sqrt(-2.0 * std::log(t / norm_));
    r = std::min(r, k_);
    return unit_ball_volume(n_) * std::pow(r, n_);
  }
  bool radial() const override { return true; }
  bool radial_decreasing() const override { return true; }
  Density rearranged() const override {
    return Density(std::make_shared<TruncatedGaussianImpl>(n_, sigma_, k_));
  }
  double sigma() const { return sigma_; }
  double cutoff() const { return k_; }

 private:
  int n_;
  double sigma_, k_;
  double mass_;
  double norm_;
};

// -- radial profile table ----------------------------------------------------

class RadialTableImpl final : public DensityImpl {
 public:
  RadialTableImpl(int n, std::vector<double> radii, std::vector<double> values)
      : n_(n), r_(std::move(radii)), v_(std::move(values)) {
    if (n < 1) throw std::invalid_argument("radial_table: dimension must be >= 1");
    if (r_.size() != v_.size() || r_.size() < 2)
      throw std::invalid_argument("radial_table: need matching radii/values with >= 2 entries");
    if (r_.front() != 0.0) throw std::invalid_argument("radial_table: radii must start at 0");
    if (!std::is_sorted(r_.begin(), r_.end()))
      throw std::invalid_argument("radial_table: radii must be increasing");
    for (double v : v_)
      if (v < 0.0) throw std::invalid_argument("radial_table: negative value");
    build_cdf();
  }
  int dim() const override { return n_; }
  double profile(double r) const {
    if (r >= r_.back()) return 0.0;
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const std::size_t j = static_cast<std::size_t>(it - r_.begin());
    if (j == 0) return v_.front();
    const double w = (r - r_[j - 1]) / (r_[j] - r_[j - 1]);
    return v_[j - 1] + w * (v_[j] - v_[j - 1]);
  }
  double eval(const Eigen::VectorXd& x) const override { return profile(x.norm()); }
  Eigen::VectorXd sample(RngStream& rng) const override {
    const double target = rng.uniform01() * cdf_.back();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
    j = std::min(std::max<std::size_t>(j, 1), cdf_.size() - 1);
    const double c0 = cdf_[j - 1], c1 = cdf_[j];
    const double w = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
    const double r = grid_[j - 1] + w * (grid_[j] - grid_[j - 1]);
    return r * draw_sphere(n_, rng);
  }
  double sup_norm() const override { return *std::max_element(v_.begin(), v_.end()); }
  double support_radius() const override { return r_.back(); }
  std::string family() const override { return "radial-table"; }
  Density1D marginal(const Eigen::VectorXd&) const override {
    Density1D m;
    const double R = r_.back();
    m.lo = -R;
    m.hi = R;
    m.breakpoints = {0.0};
    const int n = n_;
    auto self = shared_self_.lock();
    if (!self) throw std::runtime_error("radial_table: marginal requires shared ownership");
    m.pdf = [self, n, R](double t) {
      const double at = std::abs(t);
      if (at >= R) return 0.0;
      if (n == 1) return self->profile(at);
      const double smax = std::sqrt(R * R - t * t);
      if (n == 2) {
        return 2.0 * integrate(
                         [&](double s) { return self->profile(std::sqrt(t * t + s * s)); }, 0.0,
                         smax, {}, 1e-10, 1e-8);
      }
      // n == 3: int over the slice = 2 pi int_{|t|}^{R} profile(rho) rho drho
      return 2.0 * M_PI *
             integrate([&](double rho) { return self->profile(rho) * rho; }, at, R, {}, 1e-10, 1e-8);
    };
    return m;
  }
  double level_set_volume(double t) const override {
    // piecewise linear profile: accumulate radial intervals where profile > t
    double vol = 0.0;
    const double wn = unit_ball_volume(n_);
    for (std::size_t j = 1; j < r_.size(); ++j) {
      double a = r_[j - 1], b = r_[j];
      const double va = v_[j - 1], vb = v_[j];
      double s0 = a, s1 = b;
      if (va > t && vb > t) {
        // keep whole segment
      } else if (va <= t && vb <= t) {
        continue;
      } else {
        const double cross = a + (t - va) / (vb - va) * (b - a);
        if (va > t)
          s1 = cross;
        else
          s0 = cross;
      }
      vol += wn * (std::pow(s1, n_) - std::pow(s0, n_));
    }
    return vol;
  }
  bool radial() const override { return true; }
  bool radial_decreasing() const override {
    for (std::size_t j = 1; j < v_.size(); ++j)
      if (v_[j] > v_[j - 1] + 1e-12) return false;
    return true;
  }
  Density rearranged() const override;

  void set_self(const std::shared_ptr<const RadialTableImpl>& self) { shared_self_ = self; }
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& values() const { return v_; }

 private:
  void build_cdf() {
    // fine radial grid for sampling: mass cdf of n w_n r^{n-1} profile(r)
    const int fine = 4096;
    grid_.resize(fine + 1);
    cdf_.assign(fine + 1, 0.0);
    const double R = r_.back();
    const double nwn = n_ * unit_ball_volume(n_);
    double acc = 0.0;
    grid_[0] = 0.0;
    for (int j = 1; j <= fine; ++j) {
      const double r0 = R * (j - 1) / fine, r1 = R * j / fine;
      const double mid = 0.5 * (r0 + r1);
      acc += nwn * std::pow(mid, n_ - 1) * profile(mid) * (r1 - r0);
      grid_[static_cast<std::size_t>(j)] = r1;
      cdf_[static_cast<std::size_t>(j)] = acc;
    }
  }

  int n_;
  std::vector<double> r_, v_;
  std::vector<double> grid_, cdf_;
  std::weak_ptr<const RadialTableImpl> shared_self_;
};

class RadialTableImpl;

/// Exact decreasing rearrangement of a radial table: f*(x) is recovered by
/// bisection on the (exactly piecewise-polynomial) distribution function
/// m(t) = |{f > t}| of the source profile, so the equimeasurability and
/// contraction identities hold to solver precision rather than to a raster
/// resolution.
class RearrangedRadialImpl final : public DensityImpl {
 public:
  RearrangedRadialImpl(std::shared_ptr<const DensityImpl> source, int n, double sup, double R)
      : src_(std::move(source)), n_(n), sup_(sup) {
    const double wn = unit_ball_volume(n_);
    R_ = std::pow(src_->level_set_volume(0.0) / wn, 1.0 / n_);
    (void)R;
    build_cdf();
  }
  int dim() const override { return n_; }
  double profile(double r) const {
    if (r >= R_) return 0.0;
    const double target = unit_ball_volume(n_) * std::pow(r, n_);
    // largest t with m(t) > target; m is nonincreasing in t
    double lo = 0.0, hi = sup_ * (1.0 + 1e-12);
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (src_->level_set_volume(mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }
  double eval(const Eigen::VectorXd& x) const override { return profile(x.norm()); }
  Eigen::VectorXd sample(RngStream& rng) const override {
    const double target = rng.uniform01() * cdf_.back();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), target);
    std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
    j = std::min(std::max<std::size_t>(j, 1), cdf_.size() - 1);
    const double c0 = cdf_[j - 1], c1 = cdf_[j];
    const double w = (c1 > c0) ? (target - c0) / (c1 - c0) : 0.5;
    const double r = grid_[j - 1] + w * (grid_[j] - grid_[j - 1]);
    return r * draw_sphere(n_, rng);
  }
  double sup_norm() const override { return sup_; }
  double support_radius() const override { return R_; }
  std::string family() const override { return "radial-table"; }
  Density1D marginal(const Eigen::VectorXd&) const override {
    Density1D m;
    m.lo = -R_;
    m.hi = R_;
    m.breakpoints = {0.0};
    auto self = shared_self_.lock();
    if (!self) throw std::runtime_error("rearranged density: marginal requires shared ownership");
    const int n = n_;
    const double R = R_;
    m.pdf = [self, n, R](double t) {
      const double at = std::abs(t);
      if (at >= R) return 0.0;
      if (n == 1) return self->profile(at);
      const double smax = std::sqrt(R * R - t * t);
      if (n == 2)
        return 2.0 * integrate([&](double s) { return self->profile(std::sqrt(t * t + s * s)); },
                               0.0, smax, {}, 1e-10, 1e-8);
      return 2.0 * M_PI *
             integrate([&](double rho) { return self->profile(rho) * rho; }, at, R, {}, 1e-10, 1e-8);
    };
    return m;
  }
  double level_set_volume(double t) const override { return src_->level_set_volume(t); }
  bool radial() const override { return true; }
  bool radial_decreasing() const override { return true; }
  Density rearranged() const override {
    auto self = shared_self_.lock();
    if (!self) throw std::runtime_error("rearranged density: requires shared ownership");
    return Density(self);
  }
  void set_self(const std::shared_ptr<const RearrangedRadialImpl>& self) { shared_self_ = self; }

 private:
  void build_cdf() {
    const int fine = 4096;
    grid_.resize(fine + 1);
    cdf_.assign(fine + 1, 0.0);
    const double nwn = n_ * unit_ball_volume(n_);
    double acc = 0.0;
    grid_[0] = 0.0;
    for (int j = 1; j <= fine; ++j) {
      const double r0 = R_ * (j - 1) / fine, r1 = R_ * j / fine;
      const double mid = 0.5 * (r0 + r1);
      acc += nwn * std::pow(mid, n_ - 1) * profile(mid) * (r1 - r0);
      grid_[static_cast<std::size_t>(j)] = r1;
      cdf_[static_cast<std::size_t>(j)] = acc;
    }
  }

  std::shared_ptr<const DensityImpl> src_;
  int n_;
  double sup_;
  double R_ = 0.0;
  std::vector<double> grid_, cdf_;
  std::weak_ptr<const RearrangedRadialImpl> shared_self_;
};

/// Decreasing rearrangement from (value, measure) cells: sort by value
/// descending, map cumulative measure to radii, emit a profile table.
Density rearrange_from_cells(int n, std::vector<std::pair<double, double>> cells) {
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  const double wn = unit_ball_volume(n);
  std::vector<double> radii{0.0};
  std::vector<double> values;
  values.push_back(cells.empty() ? 0.0 : cells.front().first);
  double cum = 0.0;
  for (const auto& [val, meas] : cells) {
    if (meas <= 0.0) continue;
    cum += meas;
    radii.push_back(std::pow(cum / wn, 1.0 / n));
    values.push_back(val);
  }
  radii.push_back(radii.back() * (1.0 + 1e-12) + 1e-300);
  values.push_back(0.0);
  return radial_table(n, std::move(radii), std::move(values));
}

// -- mixture ------------------------------------------------------------------

class MixtureImpl final : public DensityImpl {
 public:
  MixtureImpl(std::vector<Density> comps, std::vector<double> weights)
      : comps_(std::move(comps)), w_(std::move(weights)) {
    if (comps_.empty() || comps_.size() != w_.size())
      throw std::invalid_argument("mixture: components and weights must match and be nonempty");
    double s = 0.0;
    for (double w : w_) {
      if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be > 0");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9)
      throw std::invalid_argument("mixture: weights must sum to 1, got " + std::to_string(s));
    n_ = comps_.front().dim();
    for (const auto& c : comps_)
      if (c.dim() != n_) throw std::invalid_argument("mixture: dimension mismatch among components");
    cum_.resize(w_.size());
    std::partial_sum(w_.begin(), w_.end(), cum_.begin());
    sup_ = scan_sup();
  }
  int dim() const override { return n_; }
  double eval(const Eigen::VectorXd& x) const override {
    double v = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) v += w_[i] * comps_[i](x);
    return v;
  }
  Eigen::VectorXd sample(RngStream& rng) const override {
    const double u = rng.uniform01();
    const std::size_t i = static_cast<std::size_t>(
        std::lower_bound(cum_.begin(), cum_.end(), u) - cum_.begin());
    return comps_[std::min(i, comps_.size() - 1)].sample(rng);
  }
  double sup_norm() const override { return sup_; }
  double support_radius() const override {
    double r = 0.0;
    for (const auto& c : comps_) r = std::max(r, c.support_radius());
    return r;
  }
  std::string family() const override { return "mixture"; }
  Density1D marginal(const Eigen::VectorXd& u) const override {
    std::vector<Density1D> parts;
    parts.reserve(comps_.size());
    for (const auto& c : comps_) parts.push_back(c.marginal(u));
    Density1D m;
    m.lo = kInf;
    m.hi = -kInf;
    for (const auto& p : parts) {
      m.lo = std::min(m.lo, p.lo);
      m.hi = std::max(m.hi, p.hi);
      m.breakpoints.insert(m.breakpoints.end(), p.breakpoints.begin(), p.breakpoints.end());
      m.breakpoints.push_back(p.lo);
      m.breakpoints.push_back(p.hi);
    }
    auto w = w_;
    m.pdf = [parts = std::move(parts), w](double t) {
      double v = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i)
        if (t >= parts[i].lo && t <= parts[i].hi) v += w[i] * parts[i].pdf(t);
      return v;
    };
    return m;
  }
  double level_set_volume(double t) const override {
    return grid_measure_above(t);
  }
  bool radial() const override {
    for (const auto& c : comps_)
      if (!c.is_radial()) return false;
    return true;
  }
  Density rearranged() const override {
    if (radial()) {
      // 1-D layer cake on the mixed radial profile
      const double R = support_radius();
      const int fine = 8192;
      std::vector<std::pair<double, double>> cells;
      cells.reserve(fine);
      const double wn = unit_ball_volume(n_);
      Eigen::VectorXd x = zero_vec(n_);
      for (int j = 0; j < fine; ++j) {
        const double r0 = R * j / fine, r1 = R * (j + 1) / fine;
        x[0] = 0.5 * (r0 + r1);
        cells.emplace_back(eval(x), wn * (std::pow(r1, n_) - std::pow(r0, n_)));
      }
      return rearrange_from_cells(n_, std::move(cells));
    }
    if (n_ != 2)
      throw std::invalid_argument("rearrange: non-radial mixtures supported in dimension 2 only");
    const double R = support_radius();
    const int res = 1024;
    std::vector<std::pair<double, double>> cells;
    cells.reserve(static_cast<std::size_t>(res) * res);
    const double h = 2.0 * R / res, cell_area = h * h;
    Eigen::VectorXd x(2);
    for (int iy = 0; iy < res; ++iy)
      for (int ix = 0; ix < res; ++ix) {
        x[0] = -R + (ix + 0.5) * h;
        x[1] = -R + (iy + 0.5) * h;
        const double v = eval(x);
        if (v > 0.0) cells.emplace_back(v, cell_area);
      }
    return rearrange_from_cells(2, std::move(cells));
  }

 private:
  double scan_sup() const {
    // candidates: component peaks and a raster scan over the joint support
    double best = 0.0;
    const double R = support_radius();
    if (n_ <= 3) {
      const int res = (n_ == 3) ? 96 : 768;
      Eigen::VectorXd x = zero_vec(n_);
      std::vector<int> idx(static_cast<std::size_t>(n_), 0);
      const double h = 2.0 * R / res;
      std::function<void(int)> scan = [&](int k) {
        if (k == n_) {
          best = std::max(best, eval(x));
          return;
        }
        for (int i = 0; i < res; ++i) {
          x[k] = -R + (i + 0.5) * h;
          scan(k + 1);
        }
      };
      scan(0);
    }
    // grid max; the true sup is at most the weighted sum of component sups
    double cap = 0.0;
    for (std::size_t i = 0; i < comps_.size(); ++i) cap += w_[i] * comps_[i].sup_norm();
    return best > 0.0 ? std::min(best, cap) : cap;
  }
  double grid_measure_above(double t) const {
    if (n_ > 3) throw std::invalid_argument("level_set_volume: mixture supported for n <= 3");
    const double R = support_radius();
    const int res = (n_ == 3) ? 128 : 1024;
    const double h = 2.0 * R / res;
    double cell = std::pow(h, n_);
    std::size_t count = 0;
    Eigen::VectorXd x = zero_vec(n_);
    std::function<void(int)> scan = [&](int k) {
      if (k == n_) {
        if (eval(x) > t) ++count;
        return;
      }
      for (int i = 0; i < res; ++i) {
        x[k] = -R + (i + 0.5) * h;
        scan(k + 1);
      }
    };
    scan(0);
    return cell * static_cast<double>(count);
  }

  std::vector<Density> comps_;
  std::vector<double> w_;
  std::vector<double> cum_;
  int n_;
  double sup_;
};

// -- grid raster (n = 2) -------------------------------------------------------

class GridDensityImpl final : public DensityImpl {
 public:
  GridDensityImpl(double lo, double hi, int res, std::vector<double> values)
      : lo_(lo), hi_(hi), res_(res), v_(std::move(values)) {
    if (!(hi > lo)) throw std::invalid_argument("grid_density: requires box_hi > box_lo");
    if (res < 2) throw std::invalid_argument("grid_density: resolution must be >= 2");
    if (v_.size() != static_cast<std::size_t>(res) * static_cast<std::size_t>(res))
      throw std::invalid_argument("grid_density: expected resolution^2 values");
    h_ = (hi - lo) / res;
    double mass = 0.0;
    for (double v : v_) {
      if (v < 0.0) throw std::invalid_argument("grid_density: negative cell value");
      mass += v * h_ * h_;
    }
    if (std::abs(mass - 1.0) > 1e-6)
      throw std::invalid_argument("grid_density: cell masses must sum to 1 (within 1e-6), got " +
                                  std::to_string(mass));
    cdf_.resize(v_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      acc += v_[i] * h_ * h_;
      cdf_[i] = acc;
    }
  }
  int dim() const override { return 2; }
  double eval(const Eigen::VectorXd& x) const override {
    const int ix = static_cast<int>(std::floor((x[0] - lo_) / h_));
    const int iy = static_cast<int>(std::floor((x[1] - lo_) / h_));
    if (ix < 0 || iy < 0 || ix >= res_ || iy >= res_) return 0.0;
    return v_[static_cast<std::size_t>(iy) * static_cast<std::size_t>(res_) +
              static_cast<std::size_t>(ix)];
  }
  Eigen::VectorXd sample(RngStream& rng) const override {
    const double u = rng.uniform01() * cdf_.back();
    const std::size_t i = static_cast<std::size_t>(
        std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    const std::size_t j = std::min(i, v_.size() - 1);
    const int iy = static_cast<int>(j) / res_;
    const int ix = static_cast<int>(j) % res_;
    Eigen::VectorXd x(2);
    x[0] = lo_ + (ix + rng.uniform01()) * h_;
    x[1] = lo_ + (iy + rng.uniform01()) * h_;
    return x;
  }
  double sup_norm() const override { return *std::max_element(v_.begin(), v_.end()); }
  double support_radius() const override {
    return std::sqrt(2.0) * std::max(std::abs(lo_), std::abs(hi_));
  }
  std::string family() const override { return "custom-grid"; }
  Density1D marginal(const Eigen::VectorXd& u) const override {
    Density1D m;
    const double R = support_radius();
    m.lo = -R;
    m.hi = R;
    auto basis = complement_basis(u);
    const Eigen::VectorXd uu = u, vv = basis[0];
    const double lo = lo_, h = h_;
    const int res = res_;
    const auto& vals = v_;
    // exact: sum over cells of value * chord-length of the cell at offset t
    m.pdf = [uu, vv, lo, h, res, &vals, self = shared_self_.lock()](double t) {
      double total = 0.0;
      std::vector<double> a{0.5 * h, 0.5 * h};
      for (int iy = 0; iy < res; ++iy)
        for (int ix = 0; ix < res; ++ix) {
          const double v = vals[static_cast<std::size_t>(iy) * static_cast<std::size_t>(res) +
                                static_cast<std::size_t>(ix)];
          if (v == 0.0) continue;
          const double cx = lo + (ix + 0.5) * h, cy = lo + (iy + 0.5) * h;
          // shift so the cell is centered: offset t' = t - <c,u>
          const double tc = t - (cx * uu[0] + cy * uu[1]);
          total += v * box_chord(a, uu, vv, tc);
        }
      return total;
    };
    return m;
  }
  double level_set_volume(double t) const override {
    // level sets are unions of cells: exact cell counting
    double area = 0.0;
    for (double v : v_)
      if (v > t) area += h_ * h_;
    return area;
  }
  Density rearranged() const override {
    std::vector<std::pair<double, double>> cells;
    cells.reserve(v_.size());
    for (double v : v_)
      if (v > 0.0) cells.emplace_back(v, h_ * h_);
    return rearrange_from_cells(2, std::move(cells));
  }
  void set_self(const std::shared_ptr<const GridDensityImpl>& self) { shared_self_ = self; }
  double box_lo() const { return lo_; }
  double box_hi() const { return hi_; }
  int resolution() const { return res_; }
  const std::vector<double>& values() const { return v_; }

 private:
  double lo_, hi_;
  int res_;
  std::vector<double> v_;
  double h_;
  std::vector<double> cdf_;
  std::weak_ptr<const GridDensityImpl> shared_self_;
};

}  // namespace

// ---------------------------------------------------------------------------
// factories

Density uniform_ball(int n, double radius, Eigen::VectorXd center) {
  return Density(std::make_shared<UniformBallImpl>(n, radius, std::move(center)));
}
Density uniform_box(int n, std::vector<double> halfwidth) {
  return Density(std::make_shared<UniformBoxImpl>(n, std::move(halfwidth)));
}
Density uniform_annulus(int n, double r_inner, double r_outer) {
  return Density(std::make_shared<UniformAnnulusImpl>(n, r_inner, r_outer));
}
Density truncated_gaussian(int n, double sigma, double cutoff_radius) {
  return Density(std::make_shared<TruncatedGaussianImpl>(n, sigma, cutoff_radius));
}
Density mixture(std::vector<Density> components, std::vector<double> weights) {
  return Density(std::make_shared<MixtureImpl>(std::move(components), std::move(weights)));
}
Density grid_density(double box_lo, double box_hi, int resolution,
                     std::vector<double> values_row_major) {
  auto impl = std::make_shared<GridDensityImpl>(box_lo, box_hi, resolution,
                                                std::move(values_row_major));
  impl->set_self(impl);
  return Density(impl);
}
Density radial_table(int n, std::vector<double> radii, std::vector<double> values) {
  auto impl = std::make_shared<RadialTableImpl>(n, std::move(radii), std::move(values));
  impl->set_self(impl);
  return Density(impl);
}

Density RadialTableImpl::rearranged() const {
  auto self = shared_self_.lock();
  if (!self) throw std::runtime_error("radial_table: rearranged requires shared ownership");
  auto out = std::make_shared<RearrangedRadialImpl>(self, n_, sup_norm(), r_.back());
  out->set_self(out);
  return Density(out);
}

// ---------------------------------------------------------------------------
// file raster format: see README ("grid raster format")

Density load_grid_density(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_grid_density: cannot open " + path);
  std::string line;
  int n = 0, res = 0;
  double lo = 0.0, hi = 0.0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    std::getline(ss, key, ',');
    if (key == "n") {
      ss >> n;
    } else if (key == "box") {
      char comma;
      ss >> lo >> comma >> hi;
    } else if (key == "resolution") {
      ss >> res;
    } else if (key == "values") {
      double v;
      char comma;
      while (ss >> v) {
        values.push_back(v);
        ss >> comma;
      }
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        while (row >> v) {
          values.push_back(v);
          row >> comma;
        }
      }
    } else {
      throw std::runtime_error("load_grid_density: unknown header key '" + key + "'");
    }
  }
  if (n != 2) throw std::runtime_error("load_grid_density: only n=2 rasters are supported");
  return grid_density(lo, hi, res, std::move(values));
}

void save_grid_density(const Density& d, const std::string& path) {
  const auto* g = dynamic_cast<const GridDensityImpl*>(&d.impl());
  if (g == nullptr)
    throw std::invalid_argument("save_grid_density: density is not a grid raster");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_grid_density: cannot open " + path);
  out.precision(17);
  out << "n," << 2 << "\n";
  out << "box," << g->box_lo() << "," << g->box_hi() << "\n";
  out << "resolution," << g->resolution() << "\n";
  out << "values\n";
  const auto& v = g->values();
  for (int iy = 0; iy < g->resolution(); ++iy) {
    for (int ix = 0; ix < g->resolution(); ++ix) {
      if (ix) out << ",";
      out << v[static_cast<std::size_t>(iy) * static_cast<std::size_t>(g->resolution()) +
               static_cast<std::size_t>(ix)];
    }
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// operations

Density rearrange(const Density& f) {
  if (!std::isfinite(f.support_radius()) && f.family() != "truncated-gaussian")
    throw std::invalid_argument("rearrange: needs compact support or a Gaussian-family tail");
  return f.impl().rearranged();
}

Density1D marginal_1d(const Density& f, const Eigen::VectorXd& u) {
  if (f.dim() > 3) throw std::invalid_argument("marginal_1d: supported for n <= 3");
  if (!std::isfinite(f.support_radius()) && f.family() != "truncated-gaussian")
    throw std::invalid_argument("marginal_1d: needs bounded support");
  return f.marginal(u);
}

Density ball_flatten(const Density& f) {
  const double sup = f.sup_norm();
  if (!(sup > 0.0) || !std::isfinite(sup))
    throw std::invalid_argument("ball_flatten: requires finite positive sup norm");
  const int n = f.dim();
  const double r = std::pow(unit_ball_volume(n) * sup, -1.0 / n);
  return uniform_ball(n, r);
}

Density truncate_normalize(const Density& f, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate_normalize: k must be > 0");
  if (f.support_radius() <= k) return f;
  const auto* g = dynamic_cast<const TruncatedGaussianImpl*>(&f.impl());
  if (g != nullptr) return truncated_gaussian(f.dim(), g->sigma(), std::min(g->cutoff(), k));
  if (f.is_radial()) {
    // re-profile onto a table clipped at k, then renormalize
    const int fine = 8192;
    const double R = std::min(k, f.support_radius());
    Eigen::VectorXd x = zero_vec(f.dim());
    std::vector<double> radii(fine + 1), vals(fine + 1);
    double mass = 0.0;
    const double nwn = f.dim() * unit_ball_volume(f.dim());
    for (int j = 0; j <= fine; ++j) {
      radii[static_cast<std::size_t>(j)] = R * j / fine;
      x[0] = radii[static_cast<std::size_t>(j)];
      vals[static_cast<std::size_t>(j)] = f(x);
    }
    for (int j = 0; j < fine; ++j) {
      const double mid = 0.5 * (radii[static_cast<std::size_t>(j)] + radii[static_cast<std::size_t>(j) + 1]);
      x[0] = mid;
      mass += nwn * std::pow(mid, f.dim() - 1) * f(x) * (R / fine);
    }
    if (!(mass > 0.0)) throw std::invalid_argument("truncate_normalize: truncation captures no mass");
    for (double& v : vals) v /= mass;
    return radial_table(f.dim(), std::move(radii), std::move(vals));
  }
  throw std::invalid_argument("truncate_normalize: unsupported family '" + f.family() +
                              "' with support beyond the truncation radius");
}

namespace {

bool is_uniform_indicator(const Density& d) {
  const std::string fam = d.family();
  return fam == "uniform-ball" || fam == "shifted-uniform-ball" || fam == "uniform-cube" ||
         fam == "uniform-annulus";
}

/// n-volume of the intersection of two balls (lens), n in {1,2,3}.
double ball_ball_intersection(int n, const Eigen::VectorXd& c1, double r1,
                              const Eigen::VectorXd& c2, double r2) {
  const double d = (c1 - c2).norm();
  if (d >= r1 + r2) return 0.0;
  const double rmin = std::min(r1, r2), rmax = std::max(r1, r2);
  if (d <= rmax - rmin) return unit_ball_volume(n) * std::pow(rmin, n);
  if (n == 1) return std::min(c1[0] + r1, c2[0] + r2) - std::max(c1[0] - r1, c2[0] - r2);
  if (n == 2) {
    const double a1 = std::acos(std::clamp((d * d + r1 * r1 - r2 * r2) / (2 * d * r1), -1.0, 1.0));
    const double a2 = std::acos(std::clamp((d * d + r2 * r2 - r1 * r1) / (2 * d * r2), -1.0, 1.0));
    return r1 * r1 * (a1 - 0.5 * std::sin(2 * a1)) + r2 * r2 * (a2 - 0.5 * std::sin(2 * a2));
  }
  // n == 3: standard two-cap formula
  const double term = (r1 + r2 - d) * (r1 + r2 - d) *
                      (d * d + 2 * d * (r1 + r2) - 3 * (r1 - r2) * (r1 - r2));
  return M_PI * term / (12.0 * d);
}

struct IndicatorBody {
  // A and B parts: annulus is outer-ball minus inner-ball
  Eigen::VectorXd center;
  double r_outer = 0.0, r_inner = 0.0;
  std::vector<double> box_halfwidth;  // nonempty for boxes
  double volume = 0.0;
};

IndicatorBody indicator_geometry(const Density& d) {
  IndicatorBody b;
  b.center = zero_vec(d.dim());
  const std::string fam = d.family();
  b.volume = 1.0 / d.sup_norm();
  if (fam == "uniform-cube") {
    double h = d.support_radius();  // diag; recover halfwidths from marginal support
    (void)h;
    // halfwidths via axis marginals
    for (int k = 0; k < d.dim(); ++k) {
      Density1D m = d.marginal(Eigen::VectorXd::Unit(d.dim(), k));
      b.box_halfwidth.push_back(m.hi);
    }
  } else if (fam == "uniform-ball" || fam == "shifted-uniform-ball") {
    Density1D m = d.marginal(Eigen::VectorXd::Unit(d.dim(), 0));
    const double mu = 0.5 * (m.lo + m.hi);
    b.r_outer = 0.5 * (m.hi - m.lo);
    b.center[0] = mu;
    for (int k = 1; k < d.dim(); ++k) {
      Density1D mk = d.marginal(Eigen::VectorXd::Unit(d.dim(), k));
      b.center[k] = 0.5 * (mk.lo + mk.hi);
    }
  } else if (fam == "uniform-annulus") {
    b.r_outer = d.support_radius();
    b.r_inner = std::pow(std::pow(b.r_outer, d.dim()) - 1.0 / (d.sup_norm() * unit_ball_volume(d.dim())),
                         1.0 / d.dim());
  }
  return b;
}

double indicator_intersection_volume(int n, const IndicatorBody& A, const IndicatorBody& B) {
  auto box_box = [n](const IndicatorBody& a, const IndicatorBody& b) {
    double v = 1.0;
    for (int k = 0; k < n; ++k) {
      const double lo = std::max(a.center[k] - a.box_halfwidth[static_cast<std::size_t>(k)],
                                 b.center[k] - b.box_halfwidth[static_cast<std::size_t>(k)]);
      const double hi = std::min(a.center[k] + a.box_halfwidth[static_cast<std::size_t>(k)],
                                 b.center[k] + b.box_halfwidth[static_cast<std::size_t>(k)]);
      v *= std::max(0.0, hi - lo);
    }
    return v;
  };
  const bool abox = !A.box_halfwidth.empty(), bbox = !B.box_halfwidth.empty();
  if (abox && bbox) return box_box(A, B);
  if (!abox && !bbox) {
    // (outerA - innerA) ∩ (outerB - innerB) by inclusion-exclusion
    auto cap = [&](double ra, double rb) {
      if (ra <= 0.0 || rb <= 0.0) return 0.0;
      return ball_ball_intersection(n, A.center, ra, B.center, rb);
    };
    return cap(A.r_outer, B.r_outer) - cap(A.r_outer, B.r_inner) - cap(A.r_inner, B.r_outer) +
           cap(A.r_inner, B.r_inner);
  }
  throw std::invalid_argument("lp_distance: mixed ball/box indicator pair not supported in closed form");
}

}  // namespace

double lp_distance(const Density& f, const Density& g, double p) {
  if (f.dim() != g.dim())
    throw std::invalid_argument("lp_distance: dimension mismatch (" + std::to_string(f.dim()) +
                                " vs " + std::to_string(g.dim()) + ")");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_distance: requires p >= 1");
  if (!std::isfinite(f.support_radius()) || !std::isfinite(g.support_radius()))
    throw std::invalid_argument("lp_distance: requires compact support");
  const int n = f.dim();

  if (is_uniform_indicator(f) && is_uniform_indicator(g)) {
    const IndicatorBody A = indicator_geometry(f), B = indicator_geometry(g);
    bool closed = (A.box_halfwidth.empty() == B.box_halfwidth.empty());
    if (closed) {
      const double inter = indicator_intersection_volume(n, A, B);
      const double va = f.sup_norm(), vb = g.sup_norm();
      const double only_a = A.volume - inter, only_b = B.volume - inter;
      const double s = std::pow(va, p) * only_a + std::pow(vb, p) * only_b +
                       std::pow(std::abs(va - vb), p) * inter;
      return std::pow(s, 1.0 / p);
    }
  }
  if (f.is_radial() && g.is_radial()) {
    const double R = std::max(f.support_radius(), g.support_radius());
    Eigen::VectorXd xf = zero_vec(n), xg = zero_vec(n);
    const double nwn = n * unit_ball_volume(n);
    const double s = integrate(
        [&](double r) {
          xf[0] = r;
          xg[0] = r;
          return std::pow(std::abs(f(xf) - g(xg)), p) * nwn * std::pow(r, n - 1);
        },
        0.0, R, {f.support_radius(), g.support_radius()}, 1e-11, 1e-9);
    return std::pow(s, 1.0 / p);
  }
  if (n > 2) throw std::invalid_argument("lp_distance: general pairs supported for n = 2 only");
  // midpoint raster fallback (documented accuracy ~1e-3 for indicator pairs)
  const double R = std::max(f.support_radius(), g.support_radius());
  const int res = 1200;
  const double h = 2.0 * R / res;
  double s = 0.0;
  Eigen::VectorXd x(2);
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      x[0] = -R + (ix + 0.5) * h;
      x[1] = -R + (iy + 0.5) * h;
      s += std::pow(std::abs(f(x) - g(x)), p) * h * h;
    }
  return std::pow(s, 1.0 / p);
}

}  // namespace starvol
