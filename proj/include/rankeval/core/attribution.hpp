#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankeval/core/records.hpp"

namespace rankeval {

struct AttributedEvent {
  EventRecord event;
  const ExposureRecord* exposure = nullptr;  // points into the input span
};

struct AttributionResult {
  std::vector<AttributedEvent> pairs;
  std::vector<std::string> diagnostics;  // rejected events, one line each
  std::int64_t dropped_bookings = 0;     // bookings with no exposure in window
};

namespace detail {

inline bool in_window(const AttributionWindow& w, Tick exposure_ts,
                      Tick event_ts) {
  switch (w.kind) {
    case AttributionWindow::Kind::AllInPeriod:
      return true;
    case AttributionWindow::Kind::LastSearch:
      return exposure_ts <= event_ts;  // candidate filter; max taken later
    case AttributionWindow::Kind::LastNTicks:
      return exposure_ts <= event_ts && event_ts - exposure_ts <= w.n_ticks;
  }
  return false;
}

}  // namespace detail

// Pairs each event with the impressions it is credited to. Clicks attach to
// exactly the search they happened on. Bookings attach to every impression
// of the booked listing to the same user inside the window (all searches in
// the period for ALL_IN_PERIOD, the latest qualifying search for
// LAST_SEARCH, impressions within n ticks before the event for
// LAST_N_TICKS). The output depends only on the multiset of inputs and is
// sorted by (user, event timestamp, search, listing, exposure timestamp).
inline AttributionResult attribute_events(
    std::span<const EventRecord> events,
    std::span<const ExposureRecord> exposures,
    const AttributionWindow& window) {
  AttributionResult out;

  std::unordered_map<SearchId, const ExposureRecord*> by_search;
  by_search.reserve(exposures.size());
  std::unordered_map<UserId, std::vector<const ExposureRecord*>> by_user;
  for (const auto& x : exposures) {
    by_search.emplace(x.search, &x);  // duplicates reported by validate_log
    by_user[x.user].push_back(&x);
  }

  const auto reject = [&](const EventRecord& e, const std::string& why) {
    out.diagnostics.push_back(
        "event user=" + std::to_string(e.user.value) +
        " search=" + std::to_string(e.search.value) +
        " listing=" + std::to_string(e.listing.value) + ": " + why);
  };

  for (const auto& e : events) {
    const auto it = by_search.find(e.search);
    if (it == by_search.end()) {
      reject(e, "references unknown search");
      continue;
    }
    const ExposureRecord* origin = it->second;
    if (!origin->shown_contains(e.listing)) {
      reject(e, "listing not present in the shown list of its search");
      continue;
    }

    if (e.kind == EventKind::Click) {
      out.pairs.push_back({e, origin});
      continue;
    }

    // Booking: expand over the user's impressions of the booked listing.
    std::vector<const ExposureRecord*> hits;
    for (const ExposureRecord* x : by_user[e.user]) {
      if (!x->shown_contains(e.listing)) continue;
      if (!detail::in_window(window, x->timestamp, e.timestamp)) continue;
      hits.push_back(x);
    }
    if (window.kind == AttributionWindow::Kind::LastSearch && !hits.empty()) {
      const ExposureRecord* last = hits.front();
      for (const ExposureRecord* x : hits)
        if (x->timestamp > last->timestamp ||
            (x->timestamp == last->timestamp &&
             x->search.value > last->search.value))
          last = x;
      hits = {last};
    }
    if (hits.empty()) {
      ++out.dropped_bookings;
      reject(e, "no qualifying exposure in the attribution window");
      continue;
    }
    for (const ExposureRecord* x : hits) out.pairs.push_back({e, x});
  }

  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const AttributedEvent& a, const AttributedEvent& b) {
              const auto key = [](const AttributedEvent& p) {
                return std::make_tuple(
                    p.event.user.value, p.event.timestamp,
                    p.event.search.value, p.event.listing.value,
                    static_cast<int>(p.event.kind),
                    p.exposure->timestamp, p.exposure->search.value);
              };
              return key(a) < key(b);
            });
  std::sort(out.diagnostics.begin(), out.diagnostics.end());
  return out;
}

}  // namespace rankeval
