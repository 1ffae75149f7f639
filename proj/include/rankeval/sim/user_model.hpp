#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rankeval/core/records.hpp"
#include "rankeval/errors.hpp"
#include "rankeval/sim/catalog.hpp"
#include "rankeval/sim/rng.hpp"

namespace rankeval::sim {

// Position-biased behavior models.
//
// CASCADE: the user scans top-down, keeps examining with probability
// examination_decay per step (so P(examine rank r) = decay^(r-1)), clicks an
// examined item with click_given_exam(utility), and a click converts to a
// booking with book_given_click. One booking ends the journey.
//
// RANDOM_CLICK: every shown item is clicked independently with probability
// base_click, blind to rank and utility.
//
// PAIR_LOCAL: used for set-level treatments. On an interleaved list the user
// walks competitive pairs with the same positional decay and, when engaged,
// clicks the side-by-side better (higher utility) member. On a plain list
// the user is order-blind within the result set: when engaged, they click
// the best item of the list wherever it is ranked.
struct UserModel {
  enum class Kind { Cascade, RandomClick, PairLocal };

  Kind kind = Kind::Cascade;
  double examination_decay = 0.85;
  double base_click = 0.3;
  double utility_sensitivity = 1.0;
  double book_given_click = 0.2;
  int searches_per_journey = 3;

  double click_given_exam(double utility) const {
    return base_click / (1.0 + std::exp(-utility_sensitivity * utility));
  }

  void validate() const {
    if (!(examination_decay > 0.0 && examination_decay < 1.0))
      throw ConfigError("examination_decay must be in (0,1)");
    if (base_click < 0.0 || base_click > 1.0)
      throw ConfigError("base_click must be in [0,1]");
    if (book_given_click < 0.0 || book_given_click > 1.0)
      throw ConfigError("book_given_click must be in [0,1]");
    if (searches_per_journey < 1)
      throw ConfigError("searches_per_journey must be >= 1");
  }
};

struct ShownItem {
  ListingId id;
  double utility = 0.0;
  std::optional<RankerLabel> team;  // set only for interleaved impressions
};

struct JourneyState {
  bool booked = false;
};

namespace behavior {

inline EventRecord make_event(UserId user, SearchId search, ListingId listing,
                              EventKind kind, Tick ts) {
  return {user, search, listing, kind, ts};
}

inline void click_and_maybe_book(const UserModel& model, Rng& rng,
                                 JourneyState& journey, UserId user,
                                 SearchId search, ListingId listing, Tick ts,
                                 std::vector<EventRecord>& out) {
  out.push_back(make_event(user, search, listing, EventKind::Click, ts));
  if (!journey.booked && rng.next_bool(model.book_given_click)) {
    journey.booked = true;
    out.push_back(make_event(user, search, listing, EventKind::Booking, ts + 1));
  }
}

inline void simulate_cascade(const std::vector<ShownItem>& shown,
                             const UserModel& model, Rng& rng,
                             JourneyState& journey, UserId user,
                             SearchId search, Tick base_tick,
                             std::vector<EventRecord>& out) {
  for (std::size_t r = 0; r < shown.size(); ++r) {
    if (r > 0 && !rng.next_bool(model.examination_decay)) break;
    if (rng.next_bool(model.click_given_exam(shown[r].utility)))
      click_and_maybe_book(model, rng, journey, user, search, shown[r].id,
                           base_tick + static_cast<Tick>(r) + 1, out);
    if (journey.booked) break;
  }
}

inline void simulate_random_click(const std::vector<ShownItem>& shown,
                                  const UserModel& model, Rng& rng,
                                  JourneyState& journey, UserId user,
                                  SearchId search, Tick base_tick,
                                  std::vector<EventRecord>& out) {
  for (std::size_t r = 0; r < shown.size(); ++r) {
    if (rng.next_bool(model.base_click))
      click_and_maybe_book(model, rng, journey, user, search, shown[r].id,
                           base_tick + static_cast<Tick>(r) + 1, out);
  }
}

inline void simulate_pair_local(const std::vector<ShownItem>& shown,
                                bool is_interleaved, const UserModel& model,
                                Rng& rng, JourneyState& journey, UserId user,
                                SearchId search, Tick base_tick,
                                std::vector<EventRecord>& out) {
  if (!is_interleaved) {
    // Order-blind within the set: engage with the best listing of the list.
    if (shown.empty() || !rng.next_bool(model.base_click)) return;
    std::size_t best = 0;
    for (std::size_t r = 1; r < shown.size(); ++r)
      if (shown[r].utility > shown[best].utility) best = r;
    click_and_maybe_book(model, rng, journey, user, search, shown[best].id,
                         base_tick + static_cast<Tick>(best) + 1, out);
    return;
  }

  // Walk pair groups: members of a competitive pair are adjacent; untagged
  // entries stand alone.
  std::size_t i = 0;
  std::size_t group = 0;
  while (i < shown.size()) {
    const bool paired = shown[i].team && i + 1 < shown.size() &&
                        shown[i + 1].team &&
                        *shown[i + 1].team != *shown[i].team;
    if (group > 0 && !rng.next_bool(model.examination_decay)) break;
    if (rng.next_bool(model.base_click)) {
      std::size_t pick = i;
      if (paired && shown[i + 1].utility > shown[i].utility) pick = i + 1;
      click_and_maybe_book(model, rng, journey, user, search, shown[pick].id,
                           base_tick + static_cast<Tick>(pick) + 1, out);
      if (journey.booked) return;
    }
    i += paired ? 2 : 1;
    ++group;
  }
}

}  // namespace behavior

// Simulates one search impression for one user; events are appended in
// deterministic order. The journey's booking state carries across searches.
inline void simulate_impression(const std::vector<ShownItem>& shown,
                                bool is_interleaved, const UserModel& model,
                                Rng& rng, JourneyState& journey, UserId user,
                                SearchId search, Tick base_tick,
                                std::vector<EventRecord>& out) {
  switch (model.kind) {
    case UserModel::Kind::Cascade:
      behavior::simulate_cascade(shown, model, rng, journey, user, search,
                                 base_tick, out);
      return;
    case UserModel::Kind::RandomClick:
      behavior::simulate_random_click(shown, model, rng, journey, user, search,
                                      base_tick, out);
      return;
    case UserModel::Kind::PairLocal:
      behavior::simulate_pair_local(shown, is_interleaved, model, rng, journey,
                                    user, search, base_tick, out);
      return;
  }
}

// Single-list convenience entry point: one search, fresh journey,
// deterministic per user_seed.
inline std::vector<EventRecord> simulate_user(const RankedList& shown_list,
                                              const UserModel& model,
                                              std::uint64_t user_seed,
                                              const Catalog& catalog) {
  if (shown_list.items.empty())
    throw ConfigError("simulate_user: empty shown list");
  std::vector<ShownItem> shown;
  shown.reserve(shown_list.items.size());
  for (const auto& id : shown_list.items)
    shown.push_back({id, catalog.utility_of(id), std::nullopt});
  auto rng = Rng::keyed(user_seed, Stream::Behavior, 0, 0);
  JourneyState journey;
  std::vector<EventRecord> events;
  simulate_impression(shown, false, model, rng, journey,
                      UserId{user_seed}, shown_list.search, 0, events);
  return events;
}

}  // namespace rankeval::sim
