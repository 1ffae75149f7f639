#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rankeval/core/ids.hpp"
#include "rankeval/delivery/hash.hpp"
#include "rankeval/errors.hpp"

namespace rankeval::delivery {

using ExperimentId = std::string;

struct Lane {
  LaneId id;
  double weight = 1.0;
  Mode mode = Mode::Interleaving;
};

// Two-layer split: layer 1 separates regular A/B traffic from the online
// evaluation pool, layer 2 buckets online-eval users into lanes (one lane
// per experiment). Salts keep the two layers independent.
struct DeliveryConfig {
  double online_eval_fraction = 0.0;
  std::vector<Lane> lanes;
  std::string layer1_salt = "layer1";
  std::string layer2_salt = "layer2";

  void validate() const {
    if (online_eval_fraction < 0.0 || online_eval_fraction > 1.0)
      throw ConfigError("online_eval_fraction must be in [0,1]");
    if (online_eval_fraction > 0.0 && lanes.empty())
      throw ConfigError("online-eval traffic requires at least one lane");
    if (!lanes.empty()) {
      double total = 0.0;
      for (const auto& lane : lanes) {
        if (lane.weight <= 0.0)
          throw ConfigError("lane weight must be positive: " + lane.id);
        total += lane.weight;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("lane weights must sum to 1");
    }
  }
};

enum class Layer1 { AB, OnlineEval };

inline Layer1 layer1_assign(UserId user, const DeliveryConfig& cfg) {
  const double u =
      unit_interval(salted_hash(cfg.layer1_salt, std::to_string(user.value)));
  return u < cfg.online_eval_fraction ? Layer1::OnlineEval : Layer1::AB;
}

inline const Lane& layer2_assign(UserId user, const DeliveryConfig& cfg) {
  if (cfg.lanes.empty()) throw ConfigError("layer2_assign: empty lane list");
  const double u =
      unit_interval(salted_hash(cfg.layer2_salt, std::to_string(user.value)));
  double cum = 0.0;
  for (const auto& lane : cfg.lanes) {
    cum += lane.weight;
    if (u < cum) return lane;
  }
  return cfg.lanes.back();  // guards rounding at u ~ 1
}

// Per-search coin: which ranker goes first in every competitive pair of
// this search. Independent across experiments.
inline bool coin_flip_search(SearchId search, const ExperimentId& experiment) {
  const double u = unit_interval(
      salted_hash("coin|" + experiment, std::to_string(search.value)));
  return u < 0.5;
}

// Per-user arm assignment, stable for the experiment's lifetime and
// independent across experiment ids.
inline RankerLabel coin_flip_user(UserId user, const ExperimentId& experiment) {
  const double u = unit_interval(
      salted_hash("assign|" + experiment, std::to_string(user.value)));
  return u < 0.5 ? RankerLabel::Control : RankerLabel::Treatment;
}

}  // namespace rankeval::delivery
