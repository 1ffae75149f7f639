#pragma once

#include "rankeval/errors.hpp"

namespace rankeval::cf {

// k: top-rank threshold for the similar bucket; alpha: rank-difference
// similarity threshold; gamma: attention decay for the estimated reward;
// theta: weight of the similar component; beta1/beta2: OEC mix.
struct CfHyperparams {
  int k = 4;
  int alpha = 2;
  double gamma = 0.9;
  double theta = 0.2;
  double beta1 = 0.5;
  double beta2 = 0.5;

  void validate() const {
    if (k < 1) throw ConfigError("cf.k must be >= 1");
    if (alpha < 0) throw ConfigError("cf.alpha must be >= 0");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw ConfigError("cf.gamma must be in (0,1)");
  }
};

}  // namespace rankeval::cf
