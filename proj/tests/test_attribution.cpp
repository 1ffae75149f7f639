#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "rankeval/core/attribution.hpp"
#include "rankeval/core/validation.hpp"

using namespace rankeval;

namespace {

ExposureRecord ab_exposure(std::uint64_t user, std::uint64_t search, Tick ts,
                           std::vector<std::uint64_t> shown_items,
                           RankerLabel shown = RankerLabel::Control) {
  ExposureRecord x;
  x.search = SearchId{search};
  x.user = UserId{user};
  x.timestamp = ts;
  x.lane = "ab";
  x.mode = Mode::AB;
  x.shown_ranker = shown;
  RankedList list;
  list.ranker = RankerLabel::Control;
  list.search = x.search;
  for (auto id : shown_items) list.items.push_back(ListingId{id});
  x.list_control = list;
  x.list_treatment = list;
  x.list_treatment.ranker = RankerLabel::Treatment;
  return x;
}

EventRecord event(std::uint64_t user, std::uint64_t search,
                  std::uint64_t listing, EventKind kind, Tick ts) {
  return {UserId{user}, SearchId{search}, ListingId{listing}, kind, ts};
}

}  // namespace

TEST_CASE("booking attributes to every qualifying exposure") {
  // listing 7 shown to user 1 in three searches
  std::vector<ExposureRecord> exposures = {
      ab_exposure(1, 101, 10, {7, 8, 9}),
      ab_exposure(1, 102, 50, {5, 7, 6}),
      ab_exposure(1, 103, 90, {7, 4, 3}),
      ab_exposure(2, 201, 60, {7, 1, 2}),  // other user, never credited
  };
  const auto booking = event(1, 103, 7, EventKind::Booking, 95);

  SECTION("all in period") {
    const auto res = attribute_events(std::vector<EventRecord>{booking},
                                      exposures,
                                      AttributionWindow::all_in_period());
    REQUIRE(res.pairs.size() == 3);
    for (const auto& p : res.pairs) CHECK(p.exposure->user == UserId{1});
  }

  SECTION("last search only") {
    const auto res = attribute_events(std::vector<EventRecord>{booking},
                                      exposures,
                                      AttributionWindow::last_search());
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.pairs[0].exposure->search == SearchId{103});
  }

  SECTION("ticks window") {
    const auto res =
        attribute_events(std::vector<EventRecord>{booking}, exposures,
                         AttributionWindow::last_n_ticks(50));
    REQUIRE(res.pairs.size() == 2);  // ticks 50 and 90 fall in [45, 95]
    CHECK(res.pairs[0].exposure->timestamp == 50);
    CHECK(res.pairs[1].exposure->timestamp == 90);
  }

  SECTION("window variants nest") {
    const auto all = attribute_events(std::vector<EventRecord>{booking},
                                      exposures,
                                      AttributionWindow::all_in_period());
    const auto last = attribute_events(std::vector<EventRecord>{booking},
                                       exposures,
                                       AttributionWindow::last_search());
    for (const auto& p : last.pairs) {
      const bool found = std::any_of(
          all.pairs.begin(), all.pairs.end(), [&](const AttributedEvent& q) {
            return q.exposure->search == p.exposure->search;
          });
      CHECK(found);
    }
  }
}

TEST_CASE("clicks pair with exactly their own search") {
  std::vector<ExposureRecord> exposures = {
      ab_exposure(1, 101, 10, {7, 8}),
      ab_exposure(1, 102, 20, {7, 9}),
  };
  std::vector<EventRecord> events = {
      event(1, 101, 7, EventKind::Click, 11),
      event(1, 102, 7, EventKind::Click, 21),
  };
  const auto res = attribute_events(events, exposures,
                                    AttributionWindow::all_in_period());
  REQUIRE(res.pairs.size() == 2);
  CHECK(res.pairs[0].exposure->search == SearchId{101});
  CHECK(res.pairs[1].exposure->search == SearchId{102});
}

TEST_CASE("rejects carry diagnostics") {
  std::vector<ExposureRecord> exposures = {ab_exposure(1, 101, 10, {7, 8})};

  SECTION("unknown search") {
    const auto res =
        attribute_events(std::vector<EventRecord>{event(
                             1, 999, 7, EventKind::Click, 11)},
                         exposures, AttributionWindow::all_in_period());
    CHECK(res.pairs.empty());
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].find("unknown search") != std::string::npos);
  }

  SECTION("listing not shown") {
    const auto res =
        attribute_events(std::vector<EventRecord>{event(
                             1, 101, 42, EventKind::Booking, 11)},
                         exposures, AttributionWindow::all_in_period());
    CHECK(res.pairs.empty());
    CHECK(res.diagnostics.size() == 1);
  }

  SECTION("booking outside the window is dropped and counted") {
    const auto res =
        attribute_events(std::vector<EventRecord>{event(
                             1, 101, 7, EventKind::Booking, 500)},
                         exposures, AttributionWindow::last_n_ticks(5));
    CHECK(res.pairs.empty());
    CHECK(res.dropped_bookings == 1);
  }
}

TEST_CASE("attribution is order-insensitive and idempotent") {
  std::mt19937_64 rng(404);
  std::vector<ExposureRecord> exposures;
  std::vector<EventRecord> events;
  for (std::uint64_t u = 1; u <= 20; ++u) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const std::uint64_t sid = u * 10 + s;
      exposures.push_back(ab_exposure(u, sid, static_cast<Tick>(s * 40),
                                      {u, u + 1, u + 2}));
      if (rng() % 2)
        events.push_back(event(u, sid, u + rng() % 3, EventKind::Click,
                               static_cast<Tick>(s * 40 + 1)));
    }
    if (rng() % 2)
      events.push_back(event(u, u * 10 + 2, u, EventKind::Booking, 95));
  }

  const auto window = AttributionWindow::all_in_period();
  const auto base = attribute_events(events, exposures, window);

  auto shuffled_events = events;
  auto shuffled_exposures = exposures;
  std::shuffle(shuffled_events.begin(), shuffled_events.end(), rng);
  std::shuffle(shuffled_exposures.begin(), shuffled_exposures.end(), rng);
  const auto again =
      attribute_events(shuffled_events, shuffled_exposures, window);

  REQUIRE(base.pairs.size() == again.pairs.size());
  for (std::size_t i = 0; i < base.pairs.size(); ++i) {
    CHECK(base.pairs[i].event.search == again.pairs[i].event.search);
    CHECK(base.pairs[i].event.listing == again.pairs[i].event.listing);
    CHECK(base.pairs[i].exposure->search == again.pairs[i].exposure->search);
  }

  // clicks produce exactly one pair each
  std::size_t clicks = 0, click_pairs = 0;
  for (const auto& e : events)
    if (e.kind == EventKind::Click) ++clicks;
  for (const auto& p : base.pairs)
    if (p.event.kind == EventKind::Click) ++click_pairs;
  CHECK(clicks == click_pairs);
}

TEST_CASE("validate_log flags structural problems") {
  std::vector<ExposureRecord> good = {ab_exposure(1, 101, 10, {7, 8})};
  std::vector<EventRecord> events = {event(1, 101, 7, EventKind::Click, 11)};
  CHECK(validate_log(good, events).ok());

  SECTION("event on unshown listing") {
    std::vector<EventRecord> bad = {event(1, 101, 42, EventKind::Click, 11)};
    const auto report = validate_log(good, bad);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].code == "event_listing_not_shown");
  }

  SECTION("duplicate search ids") {
    auto dup = good;
    dup.push_back(ab_exposure(2, 101, 20, {1, 2}));
    const auto report = validate_log(dup, {});
    REQUIRE_FALSE(report.ok());
    CHECK(report.issues[0].code == "duplicate_search");
  }

  SECTION("mode field inconsistencies") {
    auto bad = good;
    bad[0].mode = Mode::Interleaving;  // no interleaved list attached
    const auto report = validate_log(bad, {});
    bool missing = false, unexpected = false;
    for (const auto& i : report.issues) {
      missing |= i.code == "missing_interleaved";
      unexpected |= i.code == "unexpected_shown_ranker";
    }
    CHECK(missing);
    CHECK(unexpected);
  }

  SECTION("event referencing unknown search") {
    std::vector<EventRecord> bad = {event(1, 999, 7, EventKind::Click, 11)};
    const auto report = validate_log(good, bad);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].code == "event_unknown_search");
  }
}
