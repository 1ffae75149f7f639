#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "rankeval/errors.hpp"
#include "rankeval/stats/basic.hpp"

namespace rankeval::stats {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Two-sided p-value for `successes` out of `trials` under a Binomial null
// with proportion `null_p`. Exact (sum of outcomes no more likely than the
// observed one) for trials <= 1000, normal approximation beyond.
inline double two_proportion_test(std::int64_t successes, std::int64_t trials,
                                  double null_p) {
  if (trials == 0) return 1.0;
  if (successes < 0 || successes > trials)
    throw ConfigError("two_proportion_test: successes out of range");
  if (null_p <= 0.0 || null_p >= 1.0)
    throw ConfigError("two_proportion_test: null proportion must be in (0,1)");

  if (trials <= 1000) {
    const double n = static_cast<double>(trials);
    const double log_p = std::log(null_p);
    const double log_q = std::log1p(-null_p);
    const auto log_pmf = [&](std::int64_t k) {
      const double kd = static_cast<double>(k);
      return std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) -
             std::lgamma(n - kd + 1.0) + kd * log_p + (n - kd) * log_q;
    };
    const double log_obs = log_pmf(successes);
    double p = 0.0;
    for (std::int64_t k = 0; k <= trials; ++k)
      if (log_pmf(k) <= log_obs + 1e-9) p += std::exp(log_pmf(k));
    return std::min(p, 1.0);
  }

  const double n = static_cast<double>(trials);
  const double z = (static_cast<double>(successes) - n * null_p) /
                   std::sqrt(n * null_p * (1.0 - null_p));
  return std::erfc(std::abs(z) / std::sqrt(2.0));
}

struct TTestResult {
  double delta = 0.0;    // mean(a) - mean(b)
  double p_value = 1.0;  // two-sided
  double se = 0.0;       // standard error of the difference
  double dof = 0.0;      // Welch-Satterthwaite degrees of freedom
};

// Welch two-sample t-test from per-group summaries.
inline TTestResult welch_t_test(const Summary& a, const Summary& b) {
  if (a.n < 2 || b.n < 2)
    throw DegenerateStatistics("welch_t_test: each sample needs >= 2 values");
  TTestResult r;
  r.delta = a.mean - b.mean;
  const double va = a.variance / static_cast<double>(a.n);
  const double vb = b.variance / static_cast<double>(b.n);
  const double se2 = va + vb;
  if (se2 <= 0.0) {
    // both samples degenerate (zero variance)
    r.se = 0.0;
    r.p_value = (r.delta == 0.0) ? 1.0 : 0.0;
    return r;
  }
  r.se = std::sqrt(se2);
  const double dof_num = se2 * se2;
  const double dof_den =
      (va * va) / static_cast<double>(a.n - 1) +
      (vb * vb) / static_cast<double>(b.n - 1);
  r.dof = dof_num / dof_den;
  const double t = r.delta / r.se;
  boost::math::students_t_distribution<double> dist(r.dof);
  r.p_value = 2.0 * boost::math::cdf(dist, -std::abs(t));
  return r;
}

inline TTestResult welch_t_test(std::span<const double> a,
                                std::span<const double> b) {
  return welch_t_test(summarize(a), summarize(b));
}

// Difference of means with p = 1 when a group is too small to test; only
// empty groups are a hard error.
inline TTestResult welch_or_untestable(const Summary& a, const Summary& b) {
  if (a.n == 0 || b.n == 0)
    throw DegenerateStatistics("welch: empty group");
  if (a.n < 2 || b.n < 2) {
    TTestResult r;
    r.delta = a.mean - b.mean;
    r.p_value = 1.0;
    return r;
  }
  return welch_t_test(a, b);
}

// Pearson chi-square independence test on a 2x2 contingency table.
inline double chi_square_independence_2x2(double n00, double n01, double n10,
                                          double n11) {
  const double total = n00 + n01 + n10 + n11;
  if (total <= 0.0)
    throw DegenerateStatistics("chi_square: empty contingency table");
  const double r0 = n00 + n01, r1 = n10 + n11;
  const double c0 = n00 + n10, c1 = n01 + n11;
  if (r0 == 0.0 || r1 == 0.0 || c0 == 0.0 || c1 == 0.0)
    throw DegenerateStatistics("chi_square: degenerate margin");
  double stat = 0.0;
  const double obs[4] = {n00, n01, n10, n11};
  const double exp[4] = {r0 * c0 / total, r0 * c1 / total, r1 * c0 / total,
                         r1 * c1 / total};
  for (int i = 0; i < 4; ++i) {
    const double d = obs[i] - exp[i];
    stat += d * d / exp[i];
  }
  boost::math::chi_squared_distribution<double> dist(1.0);
  return 1.0 - boost::math::cdf(dist, stat);
}

}  // namespace rankeval::stats
