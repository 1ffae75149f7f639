#pragma once

#include <cmath>
#include <cstdlib>
#include <utility>

#include "rankeval/core/records.hpp"
#include "rankeval/counterfactual/hyperparams.hpp"
#include "rankeval/errors.hpp"

namespace rankeval::cf {

// Ranks of one engaged listing in the shown and counterfactual lists.
// A listing absent from the counterfactual list is capped one past its end
// and flagged, so the derived gain stays bounded.
struct PositionPair {
  int r_shown = 0;
  int r_cf = 0;
  bool missing_in_cf = false;

  int rank_diff() const { return std::abs(r_shown - r_cf); }
};

inline PositionPair locate_positions(ListingId listing,
                                     const RankedList& shown,
                                     const RankedList& counterfactual) {
  PositionPair p;
  p.r_shown = shown.rank_of(listing);
  if (p.r_shown == 0)
    throw ConfigError("locate_positions: listing absent from the shown list");
  p.r_cf = counterfactual.rank_of(listing);
  if (p.r_cf == 0) {
    p.r_cf = static_cast<int>(counterfactual.items.size()) + 1;
    p.missing_in_cf = true;
  }
  return p;
}

enum class Bucket { Sim, Diff, Neither };

// Similar: both ranks in the top k and within alpha of each other.
// Different: ranks more than alpha apart. Everything else carries no signal.
inline Bucket decompose(const PositionPair& p, const CfHyperparams& h) {
  const int d = p.rank_diff();
  if (p.r_shown <= h.k && p.r_cf <= h.k && d <= h.alpha) return Bucket::Sim;
  if (d > h.alpha) return Bucket::Diff;
  return Bucket::Neither;
}

// Estimated reward difference between showing the item where it was shown
// and where the other ranker would have put it: 1 - gamma^max(|dr|-alpha, 0).
inline double gain(const PositionPair& p, const CfHyperparams& h) {
  const int excess = std::max(p.rank_diff() - h.alpha, 0);
  return 1.0 - std::pow(h.gamma, static_cast<double>(excess));
}

// (win, loss): the shown ranker wins the gain when it ranks the engaged item
// more than alpha positions better, loses it in the mirrored case, and both
// are zero inside the similarity zone.
inline std::pair<double, double> win_loss(const PositionPair& p,
                                          const CfHyperparams& h) {
  const double g = gain(p, h);
  if (p.r_cf - p.r_shown - h.alpha > 0) return {g, 0.0};
  if (p.r_shown - p.r_cf - h.alpha > 0) return {0.0, g};
  return {0.0, 0.0};
}

}  // namespace rankeval::cf
