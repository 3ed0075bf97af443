#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>

#include "oracles.hpp"
#include "starvol/density.hpp"
#include "starvol/quadrature.hpp"
#include "starvol/special.hpp"

using namespace starvol;

namespace {
Eigen::VectorXd pt(double x, double y) { return (Eigen::VectorXd(2) << x, y).finished(); }
}  // namespace

TEST_CASE("catalog constructors") {
  const Density disc = uniform_ball(2, 1.0);
  CHECK(disc(pt(0.2, 0.3)) == doctest::Approx(1.0 / M_PI));
  CHECK(disc(pt(1.2, 0.3)) == 0.0);
  CHECK(disc.sup_norm() == doctest::Approx(1.0 / M_PI));

  const Density square = uniform_box(2, {1.0, 1.0});
  CHECK(square.sup_norm() == doctest::Approx(0.25));
  CHECK(square.support_radius() == doctest::Approx(std::sqrt(2.0)));

  const Density mix = mixture({uniform_ball(2, 1.0), uniform_ball(2, 1.0, pt(3.0, 0.0))}, {0.5, 0.5});
  // mass one: integrate the marginal along e1
  const Density1D m = marginal_1d(mix, pt(1.0, 0.0));
  CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_WITH_AS(uniform_ball(2, -1.0), doctest::Contains("radius"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(mixture({uniform_ball(2, 1.0)}, {0.7}), doctest::Contains("weights"),
                       std::invalid_argument);
  CHECK_THROWS_AS(uniform_annulus(2, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("rearrangement closed forms") {
  // square -> disc of radius 2/sqrt(pi)
  const Density sq = uniform_box(2, {1.0, 1.0});
  const Density sq_star = rearrange(sq);
  CHECK(sq_star.is_radial_decreasing());
  CHECK(sq_star.support_radius() == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(sq_star.sup_norm() == doctest::Approx(0.25).epsilon(1e-12));

  // centered gaussian -> itself
  const Density g = truncated_gaussian(2, 1.0, 5.0);
  const Density g_star = rearrange(g);
  CHECK(g_star(pt(0.3, 0.4)) == doctest::Approx(g(pt(0.3, 0.4))).epsilon(1e-12));

  // annulus {1 <= |x| <= sqrt(2)} -> unit disc
  const Density ann = uniform_annulus(2, 1.0, std::sqrt(2.0));
  const Density ann_star = rearrange(ann);
  CHECK(ann_star.support_radius() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ann_star(pt(0.1, 0.0)) == doctest::Approx(1.0 / M_PI).epsilon(1e-12));
}

TEST_CASE("marginals") {
  const Density disc = uniform_ball(2, 1.0);
  // f_u(t) = (2/pi) sqrt(1-t^2); checked against an independent Simpson oracle
  for (double ang : {0.0, 0.7, 2.1}) {
    const Eigen::VectorXd u = pt(std::cos(ang), std::sin(ang));
    const Density1D m = marginal_1d(disc, u);
    CHECK(m.pdf(0.0) == doctest::Approx(2.0 / M_PI).epsilon(1e-12));
    CHECK(m.pdf(0.5) == doctest::Approx((2.0 / M_PI) * std::sqrt(0.75)).epsilon(1e-12));
    CHECK(m.mass() == doctest::Approx(1.0).epsilon(1e-8));
  }
  // chord/area oracle: slice integral of the flat disc density
  const Density1D m0 = marginal_1d(disc, pt(1.0, 0.0));
  const double oracle = oracles::simpson(
      [](double s) { return (std::abs(s) <= std::sqrt(1 - 0.09)) ? 1.0 / M_PI : 0.0; }, -1.0, 1.0,
      200001);
  CHECK(m0.pdf(0.3) == doctest::Approx(oracle).epsilon(1e-4));

  // uniform square, axis direction -> uniform on [-1,1]
  const Density sq = uniform_box(2, {1.0, 1.0});
  const Density1D ms = marginal_1d(sq, pt(1.0, 0.0));
  CHECK(ms.pdf(0.2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ms.pdf(1.2) == 0.0);
  // diagonal direction: triangle with peak sqrt(2)/2 at 0
  const Density1D md = marginal_1d(sq, pt(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)));
  CHECK(md.pdf(0.0) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(md.mass() == doctest::Approx(1.0).epsilon(1e-9));

  // rotation invariance for radial densities
  const Density ann = uniform_annulus(2, 0.4, 1.3);
  const Density1D a1 = marginal_1d(ann, pt(1.0, 0.0));
  const Density1D a2 = marginal_1d(ann, pt(0.6, 0.8));
  for (double t : {-1.1, -0.5, 0.0, 0.3, 0.9})
    CHECK(std::abs(a1.pdf(t) - a2.pdf(t)) < 1e-8);

  // n = 3 box slice area via polygon clipping
  const Density cube3 = uniform_box(3, {1.0, 1.0, 1.0});
  Eigen::VectorXd u3(3);
  u3 << 1.0, 0.0, 0.0;
  CHECK(marginal_1d(cube3, u3).pdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
  u3 << 1.0, 1.0, 1.0;
  u3.normalize();
  CHECK(marginal_1d(cube3, u3).mass() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("ball flatten") {
  // annulus of area pi with sup 1/pi flattens to the unit disc
  const double r2 = std::sqrt(2.0);
  const Density ann = uniform_annulus(2, 1.0, r2);
  const Density flat = ball_flatten(ann);
  CHECK(flat.support_radius() == doctest::Approx(1.0).epsilon(1e-12));
  // the unit disc is a fixed point
  const Density disc = uniform_ball(2, 1.0);
  CHECK(ball_flatten(disc).support_radius() == doctest::Approx(1.0).epsilon(1e-12));
  // gaussian with sup (2 pi)^{-1} flattens to radius sqrt(2)
  const Density g = truncated_gaussian(2, 1.0, std::numeric_limits<double>::infinity());
  CHECK(g.sup_norm() == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
  CHECK(ball_flatten(g).support_radius() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("truncate and renormalize") {
  // compactly supported density inside kB is untouched
  const Density disc = uniform_ball(2, 1.0);
  CHECK(truncate_normalize(disc, 2.0)(pt(0.1, 0.1)) == doctest::Approx(1.0 / M_PI));

  // standard gaussian on the line truncated at k = 1
  const Density g1 = truncated_gaussian(1, 1.0, std::numeric_limits<double>::infinity());
  const Density t1 = truncate_normalize(g1, 1.0);
  const double expect_sup = (1.0 / std::sqrt(2.0 * M_PI)) / std::erf(1.0 / std::sqrt(2.0));
  CHECK(t1.sup_norm() == doctest::Approx(expect_sup).epsilon(1e-12));
  // quadrature oracle for the truncated mass
  Eigen::VectorXd one(1);
  one << 1.0;
  const double mass = marginal_1d(t1, one).mass();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  // mass of the truncation -> 1 as k grows: sup factor -> gaussian sup
  const Density t4 = truncate_normalize(g1, 4.0);
  CHECK(t4.sup_norm() == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-4));
}

TEST_CASE("lp distance") {
  const Density a = uniform_ball(2, 1.0);
  CHECK(lp_distance(a, a, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  // disjoint unit-area discs: total variation 2
  const double r = 1.0 / std::sqrt(M_PI);
  const Density b1 = uniform_ball(2, r, pt(-2.0, 0.0));
  const Density b2 = uniform_ball(2, r, pt(2.0, 0.0));
  CHECK(lp_distance(b1, b2, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(lp_distance(a, uniform_ball(3, 1.0), 1.0), std::invalid_argument);
}

TEST_CASE("contraction of rearrangement on random radial pairs") {
  RngStream rng(31337, 0);
  for (int trial = 0; trial < 100; ++trial) {
    // random piecewise-constant radial profiles, normalized to mass one
    auto random_profile = [&](int segs) {
      std::vector<double> radii{0.0}, vals;
      double r = 0.0;
      vals.push_back(rng.uniform(0.1, 1.0));
      for (int sgs = 0; sgs < segs; ++sgs) {
        r += rng.uniform(0.2, 0.6);
        radii.push_back(r);
        vals.push_back(rng.uniform(0.0, 1.0));
      }
      // normalize mass
      double mass = 0.0;
      for (std::size_t j = 1; j < radii.size(); ++j) {
        const double mid = 0.5 * (vals[j - 1] + vals[j]);
        mass += mid * M_PI * (radii[j] * radii[j] - radii[j - 1] * radii[j - 1]);
      }
      for (double& v : vals) v /= mass;
      return radial_table(2, radii, vals);
    };
    const Density f = random_profile(2 + trial % 3);
    const Density g = random_profile(2 + (trial + 1) % 3);
    const Density fs = rearrange(f), gs = rearrange(g);
    for (double p : {1.0, 2.0}) {
      const double before = lp_distance(f, g, p);
      const double after = lp_distance(fs, gs, p);
      INFO("trial=", trial, " p=", p, " before=", before, " after=", after);
      CHECK(after <= before + 1e-9);
    }
  }
}

TEST_CASE("contraction on random catalog pairs") {
  RngStream rng(90210, 4);
  auto random_catalog = [&]() -> Density {
    switch (rng.next_u64() % 4) {
      case 0: return uniform_ball(2, rng.uniform(0.5, 2.0));
      case 1: return uniform_box(2, {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)});
      case 2: return uniform_annulus(2, rng.uniform(0.0, 0.5), rng.uniform(0.8, 2.0));
      default: return truncated_gaussian(2, rng.uniform(0.5, 1.5), rng.uniform(2.0, 4.0));
    }
  };
  auto high_accuracy_pair = [](const Density& f, const Density& g) {
    if (f.is_radial() && g.is_radial()) return true;
    const bool fbox = f.family() == "uniform-cube", gbox = g.family() == "uniform-cube";
    if (fbox && gbox) return true;
    return !fbox && !gbox && f.family() != "truncated-gaussian" && g.family() != "truncated-gaussian";
  };
  int checked = 0;
  for (int trial = 0; checked < 100 && trial < 1000; ++trial) {
    const Density f = random_catalog();
    const Density g = random_catalog();
    if (!high_accuracy_pair(f, g)) continue;  // skip pairs served by the coarse raster path
    const Density fs = rearrange(f), gs = rearrange(g);
    for (double p : {1.0, 2.0}) {
      const double before = lp_distance(f, g, p);
      const double after = lp_distance(fs, gs, p);
      INFO("trial=", trial, " p=", p, " (", f.family(), ",", g.family(), ")");
      CHECK(after <= before + 1e-9);
    }
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("equimeasurability of catalog rearrangements") {
  const Density sq = uniform_box(2, {1.5, 0.5});
  const Density sq_star = rearrange(sq);
  for (double t : {0.0, 0.1, 0.3}) {
    const double va = sq.level_set_volume(t), vb = sq_star.level_set_volume(t);
    CHECK(std::abs(va - vb) <= 1e-5 * std::max(1.0, va));
  }
  const Density g = truncated_gaussian(2, 0.8, 3.0);
  const Density g_star = rearrange(g);
  for (double t : {0.01, 0.05, 0.1})
    CHECK(g.level_set_volume(t) == doctest::Approx(g_star.level_set_volume(t)).epsilon(1e-5));
}

TEST_CASE("pointwise monotone profiles rearrange monotonically") {
  // f <= g pointwise implies f* <= g* pointwise (layer-cake machinery)
  std::vector<double> radii{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> vf{0.3, 0.5, 0.2, 0.4, 0.0};
  std::vector<double> vg{0.4, 0.6, 0.35, 0.4, 0.1};
  const Density f = radial_table(2, radii, vf);
  const Density g = radial_table(2, radii, vg);
  const Density fs = rearrange(f), gs = rearrange(g);
  for (double r = 0.0; r < 2.2; r += 0.05)
    CHECK(fs(pt(r, 0.0)) <= gs(pt(r, 0.0)) + 1e-9);
}

TEST_CASE("sampler agrees with evaluator (projection KS)") {
  RngStream rng(777, 2);
  for (const Density& f :
       {uniform_ball(2, 1.3, pt(0.2, -0.1)), uniform_box(2, {1.0, 0.5}),
        mixture({uniform_ball(2, 1.0), uniform_box(2, {0.5, 0.5})}, {0.3, 0.7})}) {
    const Eigen::VectorXd u = pt(std::cos(0.53), std::sin(0.53));
    const Density1D m = marginal_1d(f, u);
    const std::size_t draws = 100000;
    std::vector<double> xs(draws), ws(draws, 1.0);
    for (std::size_t k = 0; k < draws; ++k) xs[k] = f.sample(rng).dot(u);
    double ess = 0.0;
    const double d = oracles::weighted_ks(xs, ws, [&](double t) { return m.cdf(t); }, &ess);
    INFO("family=", f.family(), " D=", d);
    CHECK(d < oracles::ks_critical(1e-3, static_cast<double>(draws)));
  }
}

TEST_CASE("grid raster: load/save round trip and layer cake") {
  // rasterize the uniform square and check the rearrangement radius
  const int res = 64;
  std::vector<double> vals(static_cast<std::size_t>(res) * res, 0.0);
  const double lo = -2.0, hi = 2.0, h = (hi - lo) / res;
  for (int iy = 0; iy < res; ++iy)
    for (int ix = 0; ix < res; ++ix) {
      const double x = lo + (ix + 0.5) * h, y = lo + (iy + 0.5) * h;
      if (std::abs(x) <= 1.0 && std::abs(y) <= 1.0)
        vals[static_cast<std::size_t>(iy) * res + static_cast<std::size_t>(ix)] = 1.0;
    }
  // normalize to mass one on the grid
  double mass = 0.0;
  for (double v : vals) mass += v * h * h;
  for (double& v : vals) v /= mass;
  const Density g = grid_density(lo, hi, res, vals);
  CHECK(g(pt(0.0, 0.0)) == doctest::Approx(0.25).epsilon(1e-10));
  const Density gs = rearrange(g);
  CHECK(gs.support_radius() == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(0.02));

  // marginal of the raster sums exact per-cell chords; close to the closed
  // form of the underlying square up to the rasterized boundary
  const Eigen::VectorXd dir = pt(std::cos(0.4), std::sin(0.4));
  const Density1D gm = marginal_1d(g, dir);
  const Density1D exact = marginal_1d(uniform_box(2, {1.0, 1.0}), dir);
  CHECK(gm.mass() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(gm.pdf(0.0) == doctest::Approx(exact.pdf(0.0)).epsilon(0.05));

  const std::string path = "grid_roundtrip_test.csv";
  save_grid_density(g, path);
  const Density g2 = load_grid_density(path);
  CHECK(g2(pt(0.3, 0.3)) == doctest::Approx(g(pt(0.3, 0.3))).epsilon(1e-12));
  std::remove(path.c_str());

  // mass validation: a broken raster is rejected
  std::vector<double> bad(vals);
  bad[0] += 10.0;
  CHECK_THROWS_WITH_AS(grid_density(lo, hi, res, bad), doctest::Contains("sum to 1"),
                       std::invalid_argument);
}
