#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "rankeval/errors.hpp"

namespace rankeval::stats {

struct Summary {
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance (n - 1 denominator)
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = static_cast<std::int64_t>(xs.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - s.mean;
    ss += d * d;
  }
  s.variance = ss / static_cast<double>(s.n - 1);
  return s;
}

// Streaming count/sum/sum-of-squares accumulator; mergeable.
struct Accumulator {
  std::int64_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  void merge(const Accumulator& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double v = (sum_sq - static_cast<double>(n) * m * m) /
                     static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }
  Summary summary() const { return {n, mean(), variance()}; }
};

inline double percent_delta(double tau_hat, double baseline_mean) {
  if (baseline_mean == 0.0)
    throw DegenerateStatistics("percent_delta: baseline mean is zero");
  return tau_hat / baseline_mean;
}

// Same ratio but NaN instead of throwing; used when a report field may
// legitimately have a zero baseline.
inline double percent_delta_or_nan(double tau_hat, double baseline_mean) {
  if (baseline_mean == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return tau_hat / baseline_mean;
}

}  // namespace rankeval::stats
