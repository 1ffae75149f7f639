#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "rankeval/core/records.hpp"
#include "rankeval/delivery/hash.hpp"
#include "rankeval/errors.hpp"
#include "rankeval/sim/catalog.hpp"
#include "rankeval/sim/rng.hpp"

namespace rankeval::sim {

// Ranker zoo. NOISY_UTILITY orders by utility plus Gaussian noise;
// RANDOM_TO_TOP promotes one uniformly chosen listing to rank 1;
// DIVERSITY_RERANK demotes near-duplicate-utility neighbors within a
// position window; POSITION_SWAP exchanges two fixed ranks. The label feeds
// seed derivation, so two specs with equal parameters but different labels
// draw independent noise.
struct RankerSpec {
  enum class Kind { NoisyUtility, RandomToTop, DiversityRerank, PositionSwap };

  Kind kind = Kind::NoisyUtility;
  std::string label = "ranker";
  double noise_sd = 1.0;                  // NoisyUtility
  std::shared_ptr<RankerSpec> base;       // wrappers
  int swap_depth = 0;                     // DiversityRerank window
  double penalty = 0.0;                   // DiversityRerank threshold/demotion
  int pos_i = 0, pos_j = 0;               // PositionSwap, 1-based

  void validate() const {
    switch (kind) {
      case Kind::NoisyUtility:
        if (noise_sd < 0.0)
          throw ConfigError("ranker " + label + ": noise_sd must be >= 0");
        break;
      case Kind::RandomToTop:
        if (!base) throw ConfigError("ranker " + label + ": missing base");
        base->validate();
        break;
      case Kind::DiversityRerank:
        if (!base) throw ConfigError("ranker " + label + ": missing base");
        if (swap_depth < 1)
          throw ConfigError("ranker " + label + ": swap_depth must be >= 1");
        if (penalty <= 0.0)
          throw ConfigError("ranker " + label + ": penalty must be > 0");
        base->validate();
        break;
      case Kind::PositionSwap:
        if (!base) throw ConfigError("ranker " + label + ": missing base");
        if (pos_i < 1 || pos_j < 1)
          throw ConfigError("ranker " + label + ": swap ranks are 1-based");
        base->validate();
        break;
    }
  }
};

namespace rankdetail {

struct Scored {
  Listing listing;
  double score;
};

inline void rank_into(const RankerSpec& spec,
                      const std::vector<Listing>& candidates,
                      std::uint64_t master_seed, std::uint64_t search_key,
                      std::vector<Listing>& out) {
  const std::uint64_t label_hash = delivery::xxh64(spec.label);
  switch (spec.kind) {
    case RankerSpec::Kind::NoisyUtility: {
      std::vector<Scored> scored;
      scored.reserve(candidates.size());
      auto rng =
          Rng::keyed(master_seed, Stream::RankNoise, search_key, label_hash);
      for (const auto& c : candidates)
        scored.push_back({c, c.utility + spec.noise_sd * rng.next_normal()});
      std::sort(scored.begin(), scored.end(),
                [](const Scored& a, const Scored& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.listing.id.value < b.listing.id.value;
                });
      out.clear();
      out.reserve(scored.size());
      for (const auto& s : scored) out.push_back(s.listing);
      return;
    }
    case RankerSpec::Kind::RandomToTop: {
      rank_into(*spec.base, candidates, master_seed, search_key, out);
      if (out.size() > 1) {
        auto rng = Rng::keyed(master_seed, Stream::RandomPromote, search_key,
                              label_hash);
        const auto idx = static_cast<std::size_t>(rng.next_index(out.size()));
        std::rotate(out.begin(), out.begin() + idx, out.begin() + idx + 1);
      }
      return;
    }
    case RankerSpec::Kind::DiversityRerank: {
      rank_into(*spec.base, candidates, master_seed, search_key, out);
      // An item whose utility is within `penalty` of a predecessor in the
      // previous swap_depth positions is a near-duplicate: demote its score
      // by penalty per such neighbor, then re-sort stably.
      const std::size_t n = out.size();
      std::vector<double> adjusted(n);
      for (std::size_t i = 0; i < n; ++i) {
        int dups = 0;
        const std::size_t from =
            i > static_cast<std::size_t>(spec.swap_depth)
                ? i - static_cast<std::size_t>(spec.swap_depth)
                : 0;
        for (std::size_t j = from; j < i; ++j)
          if (std::abs(out[j].utility - out[i].utility) <= spec.penalty)
            ++dups;
        adjusted[i] = out[i].utility - spec.penalty * dups;
      }
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) {
                         return adjusted[a] > adjusted[b];
                       });
      std::vector<Listing> reordered;
      reordered.reserve(n);
      for (std::size_t i : order) reordered.push_back(out[i]);
      out = std::move(reordered);
      return;
    }
    case RankerSpec::Kind::PositionSwap: {
      rank_into(*spec.base, candidates, master_seed, search_key, out);
      const auto i = static_cast<std::size_t>(spec.pos_i - 1);
      const auto j = static_cast<std::size_t>(spec.pos_j - 1);
      if (i >= out.size() || j >= out.size())
        throw ConfigError("ranker " + spec.label +
                          ": swap rank beyond list length");
      std::swap(out[i], out[j]);
      return;
    }
  }
}

}  // namespace rankdetail

// Ranks the candidate set for one search. Deterministic in
// (spec, candidates, master_seed, search_key).
inline RankedList rank(const RankerSpec& spec,
                       const std::vector<Listing>& candidates,
                       std::uint64_t master_seed, std::uint64_t search_key,
                       RankerLabel as_label, SearchId search) {
  std::vector<Listing> ordered;
  rankdetail::rank_into(spec, candidates, master_seed, search_key, ordered);
  RankedList list;
  list.ranker = as_label;
  list.search = search;
  list.items.reserve(ordered.size());
  for (const auto& l : ordered) list.items.push_back(l.id);
  return list;
}

}  // namespace rankeval::sim
