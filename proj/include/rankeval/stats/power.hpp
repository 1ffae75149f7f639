#pragma once

#include <cstdint>
#include <string>

#include "rankeval/errors.hpp"

namespace rankeval::stats {

struct PowerSpec {
  double significance_level = 0.05;
  double power_target = 0.8;
  double effect = 0.0;  // descriptive; the stream embodies the planted effect

  void validate() const {
    if (!(significance_level > 0.0 && significance_level < power_target &&
          power_target < 1.0))
      throw ConfigError("power spec requires 0 < alpha < power < 1");
  }
};

struct PowerOptions {
  int replications = 200;
  std::int64_t grid_start = 100;
  std::int64_t grid_max = 102400;  // geometric grid n, 2n, 4n, ...
};

// A replayable source of experiments: each (replication, n) call simulates a
// fresh fixed-horizon experiment with n i.i.d. users and returns the
// two-sided p-value of the metric's test. Replications must be independent.
class MetricStream {
 public:
  virtual ~MetricStream() = default;
  virtual std::string name() const = 0;
  virtual double replicate_p_value(std::uint64_t replication,
                                   std::int64_t n_users) = 0;
};

struct PowerResult {
  std::string metric;
  bool reached = false;
  std::int64_t required_n = 0;       // grid point where power was reached
  double rejection_rate = 0.0;       // empirical power at that point
  std::int64_t grid_max = 0;
};

// Smallest n on the geometric grid at which the empirical rejection rate
// reaches the power target. Fixed-horizon tests only: every replication
// draws a complete fresh sample of exactly n users, no peeking.
inline PowerResult min_sample_for_power(MetricStream& stream,
                                        const PowerSpec& spec,
                                        const PowerOptions& opt = {}) {
  spec.validate();
  if (opt.replications < 1 || opt.grid_start < 2 ||
      opt.grid_max < opt.grid_start)
    throw ConfigError("invalid power grid options");

  PowerResult result;
  result.metric = stream.name();
  result.grid_max = opt.grid_max;
  for (std::int64_t n = opt.grid_start; n <= opt.grid_max; n *= 2) {
    int rejections = 0;
    for (int rep = 0; rep < opt.replications; ++rep) {
      const double p = stream.replicate_p_value(
          static_cast<std::uint64_t>(rep) * 2654435761ULL +
              static_cast<std::uint64_t>(n),
          n);
      if (p < spec.significance_level) ++rejections;
    }
    const double rate =
        static_cast<double>(rejections) / static_cast<double>(opt.replications);
    if (rate >= spec.power_target) {
      result.reached = true;
      result.required_n = n;
      result.rejection_rate = rate;
      return result;
    }
    result.rejection_rate = rate;  // rate at the last grid point tried
  }
  result.reached = false;
  result.required_n = opt.grid_max;
  return result;
}

}  // namespace rankeval::stats
