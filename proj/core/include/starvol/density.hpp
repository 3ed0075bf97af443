#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "starvol/rng.hpp"

namespace starvol {

/// One-dimensional marginal density with support [lo, hi].
struct Density1D {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> breakpoints;  // abscissae where pdf is not smooth

  double operator()(double t) const { return pdf(t); }
  double mass() const;

  /// int |t|^p pdf(t) dt; requires p > -1.
  double abs_moment(double p) const;
  /// int g(t) pdf(t) dt; singular abscissae of g (if any) go in extra_breaks.
  double expect(const std::function<double(double)>& g,
                std::vector<double> extra_breaks = {}) const;
  double cdf(double t) const;
};

class DensityImpl;

/// A bounded probability density on R^n with evaluator, sampler, sup norm and
/// support radius. Immutable; cheap to copy (shared impl). Catalog families
/// additionally expose closed-form marginals and rearrangements.
class Density {
 public:
  Density() = default;
  explicit Density(std::shared_ptr<const DensityImpl> impl) : impl_(std::move(impl)) {}

  bool valid() const { return impl_ != nullptr; }
  int dim() const;
  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample(RngStream& rng) const;
  double sup_norm() const;
  double support_radius() const;  // +inf allowed only for gaussian-family tags
  std::string family() const;

  /// Marginal along unit direction u.
  Density1D marginal(const Eigen::VectorXd& u) const;
  /// |{f > t}|.
  double level_set_volume(double t) const;
  /// Radially symmetric and radially decreasing about the origin?
  bool is_radial_decreasing() const;
  bool is_radial() const;

  const DensityImpl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const DensityImpl> impl_;
};

// -- catalog ----------------------------------------------------------------

Density uniform_ball(int n, double radius,
                     Eigen::VectorXd center = Eigen::VectorXd());
Density uniform_box(int n, std::vector<double> halfwidth);
Density uniform_annulus(int n, double r_inner, double r_outer);
Density truncated_gaussian(int n, double sigma, double cutoff_radius);
Density mixture(std::vector<Density> components, std::vector<double> weights);
/// Piecewise-constant density on a regular raster over [box_lo, box_hi]^2.
Density grid_density(double box_lo, double box_hi, int resolution,
                     std::vector<double> values_row_major);
/// Radial profile with linear interpolation between radii[i] (rearrangement output).
Density radial_table(int n, std::vector<double> radii, std::vector<double> values);

/// Load/save the documented plain-text raster format (see README).
Density load_grid_density(const std::string& path);
void save_grid_density(const Density& d, const std::string& path);

// -- operations --------------------------------------------------------------

/// Symmetric decreasing rearrangement f*. Closed form for catalog families,
/// layer-cake inversion on a radial table otherwise.
Density rearrange(const Density& f);

Density1D marginal_1d(const Density& f, const Eigen::VectorXd& u);

/// g = ||f||_inf on r B_2^n with r chosen so that g has mass one.
Density ball_flatten(const Density& f);

/// f restricted to the ball of radius k, renormalized to mass one.
Density truncate_normalize(const Density& f, double k);

/// ||f - g||_p by exact region decomposition for indicator pairs, 1-D radial
/// quadrature for co-centered radial pairs, or grid quadrature otherwise.
double lp_distance(const Density& f, const Density& g, double p);

}  // namespace starvol
