#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starvol/bodies.hpp"
#include "starvol/centroid.hpp"
#include "starvol/density.hpp"
#include "starvol/estimate.hpp"
#include "starvol/volume.hpp"

namespace starvol {

enum class Verdict { confirmed, equality_consistent, inconclusive, violation };
const char* verdict_name(Verdict v);

/// Verdict from margin = rhs - lhs at the suite's three-sigma convention.
/// Deterministic comparisons (se = 0) use eq_tol as the equality band.
Verdict render_verdict(double margin, double margin_se, double eq_tol);

struct ComparisonReport {
  std::string name;
  Estimate lhs, rhs;
  double margin = 0.0;
  double margin_std_error = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

struct TrendReport {
  std::string name;
  std::vector<double> parameters;
  std::vector<double> values;
  std::vector<double> value_se;
  double target = 0.0;
  double target_se = 0.0;
  std::vector<double> rel_errors;
  bool monotone = false;           // nonincreasing errors, one-se slack
  double final_relative_error = 0.0;
  bool final_ci_overlap = false;   // |value - target| <= 3 (se_v + se_t) at the last point
  bool growth_flagged = false;     // used by the moment bound probe
};

// ---------------------------------------------------------------------------

struct RearrangementSpec {
  Density f;
  std::vector<SupportBody> bodies;  // kernel bodies; replicated to N blocks if a single entry
  double p = 0.5;
  double alpha = -1.0;              // >= 0 selects the L_p^alpha intersection comparison
  bool empirical = false;
  int N = 8;                        // blocks per empirical body
  std::size_t trials = 10000;
  int quad_resolution = 256;
  bool control_variates = true;     // exact-moment variance reduction (width-1 blocks, p > 0)
  bool allow_thin_blocks = false;   // bypass dim(C_i) >= n+1 for radial-function-only studies
  int workers = 1;
  std::optional<Density> rhs_density;  // default: rearrange(f)
  std::string name = "rearrangement";
};

/// E|Z(f)| vs E|Z(f*)| (or the exact-body volumes in exact mode); the f and
/// f* runs use independent substreams. The applicable hypotheses (exponent
/// range, integrality of n/|p|, kernel dimensions, N > n) are validated
/// before any sampling.
ComparisonReport rearrangement_inequality(const RearrangementSpec& spec, RngStream rng);

/// Same engine against g = ||f||_inf flattened onto a centered ball; every
/// kernel body must be unconditional.
ComparisonReport ball_flattening_inequality(RearrangementSpec spec, RngStream rng);

// ---------------------------------------------------------------------------

struct BusemannSpec {
  Density f;                 // indicator-type density over a star body
  int quad_resolution = 2048;      // n = 2 direction grid / n = 3 inner slice grid
  std::size_t mc_directions = 4096;  // n = 3 outer directions
  std::string name = "busemann";
};

/// Central-slice ratio test: int |K cap u_perp|^n dsigma(u) against
/// (omega_{n-1}^n / omega_n^{n-1}) |K|^{n-1}.
ComparisonReport busemann_ratio(const BusemannSpec& spec, RngStream rng);

/// Star body of the support of an indicator-type catalog density.
StarBody indicator_star_body(const Density& f);

// ---------------------------------------------------------------------------

enum class StudyKind { N_to_infinity, alpha_to_zero, m_to_infinity };

struct StudySpec {
  StudyKind kind = StudyKind::N_to_infinity;
  Density f;
  double p = 1.0;
  double alpha = 0.1;              // m-study regularization
  std::vector<double> parameters;  // N grid / alpha grid / m grid
  int N = 8;                       // fixed N for the m-study
  std::size_t trials = 4000;       // per grid point, MC studies
  std::size_t target_trials = 4096;  // MC target fallback
  int quad_resolution = 256;
  bool control_variates = true;
  int workers = 1;
  std::string name = "study";
};

TrendReport convergence_study(const StudySpec& spec, RngStream rng);

// ---------------------------------------------------------------------------

struct MomentBoundSpec {
  Density f;
  SupportBody body;          // replicated across blocks
  double p = 0.0;
  double epsilon = 0.5;
  std::vector<int> Ns;       // defaults to {n+1, 2n, 4n, 8n}
  std::size_t trials = 2000;
  int directions = 32;
  bool allow_thin_blocks = false;
  int workers = 1;
  std::string name = "moment_bound";
};

/// sup over a direction grid of E rho^{n+eps}(Z_{p,C_N}(F_N), u) across N;
/// flags growth beyond the joint three-sigma slack.
TrendReport moment_bound_probe(const MomentBoundSpec& spec, RngStream rng);

// ---------------------------------------------------------------------------

enum class RadialMeasure { gaussian, lebesgue_ball };

struct CefppSpec {
  std::vector<Density> columns;  // laws of the N columns of X
  SupportBody C;                 // body in R^N
  RadialMeasure nu = RadialMeasure::gaussian;
  double ball_radius = 2.0;      // for lebesgue_ball
  bool flatten_rhs = false;      // compare against ball-flattened columns (unconditional C only)
  std::size_t trials = 2000;
  std::size_t nu_budget = 512;   // measure samples per trial
  int workers = 1;
  std::string name = "cefpp";
};

/// E nu((X C)°) vs E nu((X' C)°) where X' has rearranged (or flattened) columns.
ComparisonReport cefpp_probe(const CefppSpec& spec, RngStream rng);

}  // namespace starvol
