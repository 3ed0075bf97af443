#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace starvol {

/// A Monte Carlo or quadrature result. Deterministic methods report
/// std_error = 0 and a degenerate confidence interval.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t sample_count = 0;
  double ci_lo = 0.0;   // 95% confidence interval
  double ci_hi = 0.0;
  std::uint64_t seed = 0;
  std::string method;

  static Estimate deterministic(double value, std::size_t count, std::string method) {
    Estimate e;
    e.value = value;
    e.sample_count = count;
    e.ci_lo = e.ci_hi = value;
    e.method = std::move(method);
    return e;
  }

  static Estimate monte_carlo(double mean, double se, std::size_t count, std::uint64_t seed,
                              std::string method) {
    Estimate e;
    e.value = mean;
    e.std_error = se;
    e.sample_count = count;
    e.ci_lo = mean - 1.96 * se;
    e.ci_hi = mean + 1.96 * se;
    e.seed = seed;
    e.method = std::move(method);
    return e;
  }
};

/// Running mean/variance accumulator (Welford).
class Accumulator {
 public:
  void add(double x) {
    ++count_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(count_);
    m2_ += d * (x - mean_);
  }
  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double std_error() const {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }
  void merge(const Accumulator& o) {
    if (o.count_ == 0) return;
    if (count_ == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count_ + o.count_);
    const double d = o.mean_ - mean_;
    m2_ += o.m2_ + d * d * static_cast<double>(count_) * static_cast<double>(o.count_) / total;
    mean_ += d * static_cast<double>(o.count_) / total;
    count_ += o.count_;
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace starvol
