#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "rankeval/core/records.hpp"

namespace rankeval {

// Structural checks over an experiment log. Every problem becomes a report
// entry; a well-formed log yields an empty issue list.
inline ValidationReport validate_log(std::span<const ExposureRecord> exposures,
                                     std::span<const EventRecord> events) {
  ValidationReport report;
  report.n_exposures = static_cast<std::int64_t>(exposures.size());
  report.n_events = static_cast<std::int64_t>(events.size());

  const auto issue = [&](const std::string& code, const std::string& detail) {
    report.issues.push_back({code, detail});
  };

  std::unordered_map<SearchId, const ExposureRecord*> by_search;
  by_search.reserve(exposures.size());
  for (const auto& x : exposures) {
    if (!by_search.emplace(x.search, &x).second)
      issue("duplicate_search",
            "search " + std::to_string(x.search.value) +
                " appears in more than one exposure");

    if (x.mode == Mode::Interleaving) {
      if (!x.interleaved)
        issue("missing_interleaved",
              "interleaving exposure without merged list, search " +
                  std::to_string(x.search.value));
      if (x.shown_ranker)
        issue("unexpected_shown_ranker",
              "interleaving exposure carries shown_ranker, search " +
                  std::to_string(x.search.value));
    } else {
      if (!x.shown_ranker)
        issue("missing_shown_ranker",
              "exposure without shown_ranker, search " +
                  std::to_string(x.search.value));
      if (x.interleaved)
        issue("unexpected_interleaved",
              "non-interleaving exposure carries a merged list, search " +
                  std::to_string(x.search.value));
    }

    if (x.list_control.has_duplicates() || x.list_treatment.has_duplicates())
      issue("duplicate_items",
            "ranked list with duplicate items, search " +
                std::to_string(x.search.value));

    if (x.interleaved) {
      const auto& il = *x.interleaved;
      const std::size_t want = std::min(x.list_control.items.size(),
                                        x.list_treatment.items.size());
      if (il.entries.size() != want)
        issue("interleaved_length",
              "merged list length != min(l_c, l_t), search " +
                  std::to_string(x.search.value));
      std::unordered_set<std::uint64_t> seen;
      for (const auto& e : il.entries) {
        if (!seen.insert(e.listing.value).second)
          issue("interleaved_duplicate",
                "duplicate listing in merged list, search " +
                    std::to_string(x.search.value));
        const bool in_c = x.list_control.contains(e.listing);
        const bool in_t = x.list_treatment.contains(e.listing);
        if (e.team) {
          const bool in_origin =
              *e.team == RankerLabel::Control ? in_c : in_t;
          if (!in_origin)
            issue("team_origin",
                  "tagged listing missing from its origin list, search " +
                      std::to_string(x.search.value));
        } else if (!(in_c && in_t)) {
          issue("untagged_origin",
                "untagged listing not present in both lists, search " +
                    std::to_string(x.search.value));
        }
      }
    }
  }

  for (const auto& e : events) {
    const auto it = by_search.find(e.search);
    if (it == by_search.end()) {
      issue("event_unknown_search",
            "event references search " + std::to_string(e.search.value) +
                " with no exposure");
      continue;
    }
    const ExposureRecord& x = *it->second;
    if (e.user != x.user)
      issue("event_user_mismatch",
            "event user differs from exposure user, search " +
                std::to_string(e.search.value));
    if (!x.shown_contains(e.listing))
      issue("event_listing_not_shown",
            "listing " + std::to_string(e.listing.value) +
                " absent from the shown list of search " +
                std::to_string(e.search.value));
  }

  return report;
}

}  // namespace rankeval
