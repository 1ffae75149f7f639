#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rankeval/core/attribution.hpp"
#include "rankeval/core/records.hpp"
#include "rankeval/stats/basic.hpp"
#include "rankeval/stats/tests.hpp"

namespace rankeval::interleaving {

// One data-quality metric, reported as treatment-vs-control percent delta
// over user-level aggregates with a two-sample test.
struct QualityMetric {
  std::string name;
  double mean_c = 0.0;
  double mean_t = 0.0;
  double delta_percent = 0.0;  // (mean_t - mean_c) / mean_c
  double p_value = 1.0;
  double se = 0.0;  // standard error of mean_t - mean_c
};

struct QualityReport {
  std::vector<QualityMetric> metrics;  // listings_shown, shown_first,
                                       // shown_reciprocal_rank, listings_found
  std::int64_t n_users = 0;
};

// Per-user tallies over team-tagged entries only.
struct QualityTally {
  double listings_shown_c = 0, listings_shown_t = 0;
  double shown_first_c = 0, shown_first_t = 0;
  double reciprocal_rank_c = 0, reciprocal_rank_t = 0;
  double listings_found_c = 0, listings_found_t = 0;
};

// Walks a merged list reconstructing its competitive pairs: pair members are
// always adjacent (appended in one turn), untagged entries stand alone, and
// a trailing lone tagged entry is the first member of a truncated pair.
inline void tally_exposure(const InterleavedList& il, QualityTally& t) {
  const auto& entries = il.entries;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!e.team) continue;
    const double rr = 1.0 / static_cast<double>(i + 1);
    if (*e.team == RankerLabel::Control) {
      t.listings_shown_c += 1;
      t.reciprocal_rank_c += rr;
    } else {
      t.listings_shown_t += 1;
      t.reciprocal_rank_t += rr;
    }
    const bool opens_pair =
        i + 1 < entries.size() && entries[i + 1].team &&
        *entries[i + 1].team != *e.team;
    // first member of a pair, or the lone survivor of a truncated one
    if (*e.team == RankerLabel::Control)
      t.shown_first_c += 1;
    else
      t.shown_first_t += 1;
    if (opens_pair) {
      const auto& partner = entries[i + 1];
      const double rr2 = 1.0 / static_cast<double>(i + 2);
      if (*partner.team == RankerLabel::Control) {
        t.listings_shown_c += 1;
        t.reciprocal_rank_c += rr2;
      } else {
        t.listings_shown_t += 1;
        t.reciprocal_rank_t += rr2;
      }
      ++i;  // consume the partner; it was not first
    }
  }
}

// Streaming per-user accumulation of the four quality metrics; mergeable,
// so pooled suites across millions of users stay O(1) in memory.
struct QualityAccumulator {
  stats::Accumulator shown_c, shown_t;
  stats::Accumulator first_c, first_t;
  stats::Accumulator rr_c, rr_t;
  stats::Accumulator found_c, found_t;

  void add(const QualityTally& t) {
    shown_c.add(t.listings_shown_c);
    shown_t.add(t.listings_shown_t);
    first_c.add(t.shown_first_c);
    first_t.add(t.shown_first_t);
    rr_c.add(t.reciprocal_rank_c);
    rr_t.add(t.reciprocal_rank_t);
    found_c.add(t.listings_found_c);
    found_t.add(t.listings_found_t);
  }

  void merge(const QualityAccumulator& o) {
    shown_c.merge(o.shown_c);
    shown_t.merge(o.shown_t);
    first_c.merge(o.first_c);
    first_t.merge(o.first_t);
    rr_c.merge(o.rr_c);
    rr_t.merge(o.rr_t);
    found_c.merge(o.found_c);
    found_t.merge(o.found_t);
  }

  QualityReport report() const {
    if (shown_c.n == 0)
      throw DegenerateStatistics("quality_metrics: no interleaving exposures");
    QualityReport out;
    out.n_users = shown_c.n;
    const auto build = [&](const std::string& name,
                           const stats::Accumulator& c,
                           const stats::Accumulator& t) {
      QualityMetric m;
      m.name = name;
      m.mean_c = c.mean();
      m.mean_t = t.mean();
      const auto tt = stats::welch_t_test(t.summary(), c.summary());
      m.p_value = tt.p_value;
      m.se = tt.se;
      m.delta_percent =
          stats::percent_delta_or_nan(m.mean_t - m.mean_c, m.mean_c);
      out.metrics.push_back(m);
    };
    build("listings_shown", shown_c, shown_t);
    build("shown_first", first_c, first_t);
    build("shown_reciprocal_rank", rr_c, rr_t);
    build("listings_found", found_c, found_t);
    return out;
  }
};

// Data-quality metrics over interleaving exposures: impression counts,
// first-position counts, reciprocal ranks of tagged entries, and distinct
// tagged listings clicked, all aggregated per user and compared between
// teams. A fair coin should put every delta at zero.
inline QualityReport quality_metrics(
    std::span<const ExposureRecord> exposures,
    std::span<const AttributedEvent> attributed_clicks) {
  std::unordered_map<UserId, QualityTally> tallies;
  std::unordered_map<UserId, std::unordered_set<std::uint64_t>> found_c, found_t;

  for (const auto& x : exposures) {
    if (x.mode != Mode::Interleaving || !x.interleaved) continue;
    tally_exposure(*x.interleaved, tallies[x.user]);
  }
  if (tallies.empty())
    throw DegenerateStatistics("quality_metrics: no interleaving exposures");

  for (const auto& a : attributed_clicks) {
    if (a.event.kind != EventKind::Click) continue;
    const ExposureRecord& x = *a.exposure;
    if (x.mode != Mode::Interleaving || !x.interleaved) continue;
    const auto team = x.interleaved->team_of(a.event.listing);
    if (!team) continue;
    if (*team == RankerLabel::Control)
      found_c[a.event.user].insert(a.event.listing.value);
    else
      found_t[a.event.user].insert(a.event.listing.value);
  }
  for (auto& [user, t] : tallies) {
    if (auto it = found_c.find(user); it != found_c.end())
      t.listings_found_c = static_cast<double>(it->second.size());
    if (auto it = found_t.find(user); it != found_t.end())
      t.listings_found_t = static_cast<double>(it->second.size());
  }

  QualityAccumulator acc;
  for (const auto& [user, t] : tallies) acc.add(t);
  return acc.report();
}

}  // namespace rankeval::interleaving
