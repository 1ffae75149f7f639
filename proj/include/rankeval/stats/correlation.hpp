#pragma once

#include <cmath>
#include <span>
#include <string>

#include "rankeval/errors.hpp"

namespace rankeval::stats {

// One evaluated ranker: the evaluation method's point estimate next to the
// A/B ground-truth estimate for the same ranker.
struct PointEstimatePair {
  std::string ranker_id;
  double m_eval = 0.0;
  double m_ab = 0.0;
};

inline double pearson_corr(std::span<const PointEstimatePair> pairs) {
  const std::size_t n = pairs.size();
  if (n < 3)
    throw DegenerateStatistics("pearson_corr: need at least 3 pairs");
  double mx = 0.0, my = 0.0;
  for (const auto& p : pairs) {
    mx += p.m_eval;
    my += p.m_ab;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : pairs) {
    const double dx = p.m_eval - mx;
    const double dy = p.m_ab - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw DegenerateStatistics("pearson_corr: zero variance in a coordinate");
  return sxy / std::sqrt(sxx * syy);
}

// Fraction of pairs whose estimates point the same way; zero estimates agree
// with anything.
inline double directional_agreement(std::span<const PointEstimatePair> pairs) {
  if (pairs.empty())
    throw DegenerateStatistics("directional_agreement: no pairs");
  std::size_t agree = 0;
  for (const auto& p : pairs) {
    if (p.m_eval == 0.0 || p.m_ab == 0.0 || (p.m_eval > 0) == (p.m_ab > 0))
      ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(pairs.size());
}

}  // namespace rankeval::stats
