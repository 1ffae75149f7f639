#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "rankeval/core/ids.hpp"

namespace rankeval {

// One ranker's ordered result list for one search. Ranks are 1-based,
// rank 1 is the top position. Items must be distinct.
struct RankedList {
  RankerLabel ranker = RankerLabel::Control;
  std::vector<ListingId> items;
  SearchId search;

  bool contains(ListingId id) const {
    for (const auto& x : items)
      if (x == id) return true;
    return false;
  }

  // 1-based rank, 0 if absent.
  int rank_of(ListingId id) const {
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i] == id) return static_cast<int>(i) + 1;
    return 0;
  }

  bool has_duplicates() const {
    std::unordered_set<std::uint64_t> seen;
    for (const auto& x : items)
      if (!seen.insert(x.value).second) return true;
    return false;
  }
};

struct InterleavedEntry {
  ListingId listing;
  std::optional<RankerLabel> team;  // absent for items drafted by both sides
};

// Merged list shown to the user in interleaving mode, with the per-search
// coin outcome that ordered every competitive pair.
struct InterleavedList {
  std::vector<InterleavedEntry> entries;
  bool is_c_first = true;
  SearchId search;

  std::optional<RankerLabel> team_of(ListingId id) const {
    for (const auto& e : entries)
      if (e.listing == id) return e.team;
    return std::nullopt;
  }

  bool contains(ListingId id) const {
    for (const auto& e : entries)
      if (e.listing == id) return true;
    return false;
  }
};

// What was generated and what was shown for one search impression.
struct ExposureRecord {
  SearchId search;
  UserId user;
  Tick timestamp = 0;
  LaneId lane;
  Mode mode = Mode::AB;
  std::optional<RankerLabel> shown_ranker;  // present in AB / COUNTERFACTUAL
  RankedList list_control;
  RankedList list_treatment;
  std::optional<InterleavedList> interleaved;  // present in INTERLEAVING

  const RankedList& list_for(RankerLabel w) const {
    return w == RankerLabel::Control ? list_control : list_treatment;
  }

  // True when the user could actually see `id` on this impression.
  bool shown_contains(ListingId id) const {
    if (mode == Mode::Interleaving)
      return interleaved.has_value() && interleaved->contains(id);
    return shown_ranker.has_value() && list_for(*shown_ranker).contains(id);
  }

  // 1-based rank of `id` in whatever the user saw, 0 if absent.
  int shown_rank_of(ListingId id) const {
    if (mode == Mode::Interleaving) {
      if (!interleaved) return 0;
      for (std::size_t i = 0; i < interleaved->entries.size(); ++i)
        if (interleaved->entries[i].listing == id)
          return static_cast<int>(i) + 1;
      return 0;
    }
    if (!shown_ranker) return 0;
    return list_for(*shown_ranker).rank_of(id);
  }
};

struct EventRecord {
  UserId user;
  SearchId search;
  ListingId listing;
  EventKind kind = EventKind::Click;
  Tick timestamp = 0;
};

// Rule mapping a conversion event back to the impressions that may have
// caused it.
struct AttributionWindow {
  enum class Kind { AllInPeriod, LastSearch, LastNTicks };
  Kind kind = Kind::AllInPeriod;
  Tick n_ticks = 0;  // only for LastNTicks, must be > 0

  static AttributionWindow all_in_period() { return {Kind::AllInPeriod, 0}; }
  static AttributionWindow last_search() { return {Kind::LastSearch, 0}; }
  static AttributionWindow last_n_ticks(Tick n) {
    if (n <= 0) throw ConfigError("attribution window requires n_ticks > 0");
    return {Kind::LastNTicks, n};
  }
};

// Point estimate with its test result for one metric.
struct EstimateReport {
  std::string metric_name;
  double tau_hat = 0.0;
  double baseline_mean = 0.0;
  double percent_delta = 0.0;  // tau_hat / baseline_mean; NaN when baseline 0
  double p_value = 1.0;
  std::int64_t n_units = 0;
  double variance = 0.0;  // variance of the point estimate
  std::string experiment_id;  // not serialized; guards cross-experiment math
};

struct ValidationIssue {
  std::string code;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::int64_t n_exposures = 0;
  std::int64_t n_events = 0;
  std::int64_t dropped_bookings = 0;  // bookings with no exposure in window

  bool ok() const { return issues.empty(); }
};

}  // namespace rankeval
