#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>

#include "rankeval/core/records.hpp"
#include "rankeval/errors.hpp"

namespace rankeval::interleaving {

// Smallest index strictly greater than `from` whose item is not yet in the
// merged list; nullopt when the list is exhausted.
inline std::optional<std::size_t> next_available(
    const RankedList& list, std::size_t from,
    const std::unordered_set<std::uint64_t>& merged) {
  for (std::size_t i = from + 1; i < list.items.size(); ++i)
    if (!merged.contains(list.items[i].value)) return i;
  return std::nullopt;
}

inline std::optional<std::size_t> next_available(const RankedList& list,
                                                 std::size_t from,
                                                 const InterleavedList& merged) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(merged.entries.size());
  for (const auto& e : merged.entries) seen.insert(e.listing.value);
  return next_available(list, from, seen);
}

// Competitive-pair team drafting. Walks both lists top to bottom taking the
// next available item from each side per turn: distinct items form a
// competitive pair appended in coin order with team tags, identical items
// are appended once untagged. The output is truncated to min(l_c, l_t), so
// a terminal pair may contribute only its first member.
inline InterleavedList interleave(const RankedList& control,
                                  const RankedList& treatment,
                                  bool is_c_first) {
  if (control.search != treatment.search)
    throw ConfigError("interleave: inputs belong to different searches");
  if (control.ranker == treatment.ranker)
    throw ConfigError("interleave: inputs carry the same ranker label");
  if (control.has_duplicates() || treatment.has_duplicates())
    throw ConfigError("interleave: duplicate items within an input list");

  const std::size_t len_c = control.items.size();
  const std::size_t len_t = treatment.items.size();
  const std::size_t len_out = std::min(len_c, len_t);

  InterleavedList out;
  out.is_c_first = is_c_first;
  out.search = control.search;
  out.entries.reserve(len_out + 1);

  std::unordered_set<std::uint64_t> merged;
  merged.reserve(len_out + 1);
  const auto append = [&](ListingId id, std::optional<RankerLabel> team) {
    out.entries.push_back({id, team});
    merged.insert(id.value);
  };

  std::optional<std::size_t> kc = len_c > 0 ? std::optional<std::size_t>(0)
                                            : std::nullopt;
  std::optional<std::size_t> kt = len_t > 0 ? std::optional<std::size_t>(0)
                                            : std::nullopt;

  while (kc && kt && out.entries.size() < len_out) {
    const ListingId item_c = control.items[*kc];
    const ListingId item_t = treatment.items[*kt];
    if (item_c != item_t) {
      if (is_c_first) {
        append(item_c, control.ranker);
        append(item_t, treatment.ranker);
      } else {
        append(item_t, treatment.ranker);
        append(item_c, control.ranker);
      }
    } else {
      append(item_c, std::nullopt);
    }
    kc = next_available(control, *kc, merged);
    kt = next_available(treatment, *kt, merged);
  }

  if (out.entries.size() > len_out) out.entries.resize(len_out);
  return out;
}

}  // namespace rankeval::interleaving
