#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include "rankeval/errors.hpp"

namespace rankeval {

// Opaque 64-bit identifiers. Distinct wrapper types so a listing id can
// never be passed where a user id is expected.
struct ListingId {
  std::uint64_t value = 0;
  auto operator<=>(const ListingId&) const = default;
};

struct UserId {
  std::uint64_t value = 0;
  auto operator<=>(const UserId&) const = default;
};

struct SearchId {
  std::uint64_t value = 0;
  auto operator<=>(const SearchId&) const = default;
};

using LaneId = std::string;
using Tick = std::int64_t;

enum class RankerLabel { Control, Treatment };

enum class Mode { AB, Interleaving, Counterfactual };

enum class EventKind { Click, Booking };

inline RankerLabel opposite(RankerLabel w) {
  return w == RankerLabel::Control ? RankerLabel::Treatment
                                   : RankerLabel::Control;
}

inline const char* to_string(RankerLabel w) {
  return w == RankerLabel::Control ? "CONTROL" : "TREATMENT";
}

inline const char* to_string(Mode m) {
  switch (m) {
    case Mode::AB: return "AB";
    case Mode::Interleaving: return "INTERLEAVING";
    case Mode::Counterfactual: return "COUNTERFACTUAL";
  }
  return "AB";
}

inline const char* to_string(EventKind k) {
  return k == EventKind::Click ? "CLICK" : "BOOKING";
}

inline RankerLabel ranker_label_from_string(const std::string& s) {
  if (s == "CONTROL") return RankerLabel::Control;
  if (s == "TREATMENT") return RankerLabel::Treatment;
  throw ConfigError("unknown ranker label: " + s);
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "AB") return Mode::AB;
  if (s == "INTERLEAVING") return Mode::Interleaving;
  if (s == "COUNTERFACTUAL") return Mode::Counterfactual;
  throw ConfigError("unknown mode: " + s);
}

inline EventKind event_kind_from_string(const std::string& s) {
  if (s == "CLICK") return EventKind::Click;
  if (s == "BOOKING") return EventKind::Booking;
  throw ConfigError("unknown event kind: " + s);
}

}  // namespace rankeval

template <>
struct std::hash<rankeval::ListingId> {
  std::size_t operator()(const rankeval::ListingId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

template <>
struct std::hash<rankeval::UserId> {
  std::size_t operator()(const rankeval::UserId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

template <>
struct std::hash<rankeval::SearchId> {
  std::size_t operator()(const rankeval::SearchId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
