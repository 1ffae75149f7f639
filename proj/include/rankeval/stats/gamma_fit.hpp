#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "rankeval/errors.hpp"

namespace rankeval::stats {

// Fits count_r ~ A * gamma^r by weighted least squares on
// log(count_r) = a + r*log(gamma), weighting each rank by its count so the
// thin tail does not dominate the fit. Returns gamma_0 in (0,1).
inline double fit_gamma(const std::map<int, double>& histogram) {
  double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
  int n_positive = 0;
  for (const auto& [rank, count] : histogram) {
    if (count <= 0.0) continue;
    ++n_positive;
    const double x = static_cast<double>(rank);
    const double y = std::log(count);
    const double w = count;
    sw += w;
    swx += w * x;
    swy += w * y;
    swxx += w * x * x;
    swxy += w * x * y;
  }
  if (n_positive < 3)
    throw DegenerateStatistics("fit_gamma: need >= 3 ranks with positive counts");
  const double denom = sw * swxx - swx * swx;
  if (denom <= 0.0)
    throw DegenerateStatistics("fit_gamma: degenerate rank spread");
  const double slope = (sw * swxy - swx * swy) / denom;
  const double gamma = std::exp(slope);
  if (!(gamma > 0.0) || gamma >= 1.0)
    throw DegenerateStatistics(
        "fit_gamma: fitted decay outside (0,1); histogram has no decay");
  return gamma;
}

// Candidate values centered on gamma_0 in +-0.05 steps, clipped to (0,1).
inline std::vector<double> gamma_candidate_grid(double gamma_0) {
  std::vector<double> grid;
  for (double g : {gamma_0 - 0.05, gamma_0, gamma_0 + 0.05})
    if (g > 0.0 && g < 1.0) grid.push_back(g);
  return grid;
}

}  // namespace rankeval::stats
