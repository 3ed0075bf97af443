#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace starvol {

/// Seeded, splittable random stream.
///
/// A stream is identified by (master_seed, stream_index). The k-th draw from
/// a given stream is a pure function of that triple, so replaying a run with
/// the same seeds reproduces every sample bit for bit, independent of how
/// work is distributed over threads. Parallel code derives one stream per
/// work item via derive() and never shares streams.
///
/// The engine is std::mt19937_64, whose raw output sequence is fully
/// specified by the standard. All variate transforms below are hand-rolled
/// (std::*_distribution output is implementation-defined).
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : master_seed_(master_seed), stream_index_(stream_index),
        engine_(mix(mix(0x9e3779b97f4a7c15ull ^ master_seed) ^ stream_index)) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_index() const { return stream_index_; }

  /// Child stream; distinct `k` give statistically independent streams.
  RngStream derive(std::uint64_t k) const {
    return RngStream(master_seed_, mix(stream_index_ ^ mix(k + 0x632be59bd9b4e019ull)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0,1), never exactly zero (safe under log()).
  double uniform01_pos() {
    double u = uniform01();
    while (u == 0.0) u = uniform01();
    return u;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  double exponential() { return -std::log(uniform01_pos()); }

  /// Standard normal via Box-Muller; pairs are cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double th = 2.0 * M_PI * uniform01();
    cached_ = r * std::sin(th);
    have_cached_ = true;
    return r * std::cos(th);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shape > 0.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("RngStream::gamma: shape must be > 0");
    if (shape < 1.0) {
      // boost: G(a) = G(a+1) * U^{1/a}
      const double g = gamma(shape + 1.0);
      return g * std::pow(uniform01_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace starvol
