#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <unordered_set>

#include "rankeval/interleave/team_draft.hpp"

using namespace rankeval;
using rankeval::interleaving::interleave;
using rankeval::interleaving::next_available;

namespace {

RankedList make_list(RankerLabel ranker, std::vector<std::uint64_t> ids,
                     std::uint64_t search = 1) {
  RankedList list;
  list.ranker = ranker;
  list.search = SearchId{search};
  for (auto id : ids) list.items.push_back(ListingId{id});
  return list;
}

// readable ids: a=1 b=2 c=3 d=4 e=5 f=6 g=7 x=24
constexpr std::uint64_t a = 1, b = 2, c = 3, d = 4, e = 5, f = 6, g = 7;

std::string render(const InterleavedList& il) {
  std::string out;
  for (const auto& entry : il.entries) {
    out += static_cast<char>('a' + entry.listing.value - 1);
    if (entry.team)
      out += *entry.team == RankerLabel::Control ? "^C" : "^T";
    out += ' ';
  }
  if (!out.empty()) out.pop_back();
  return out;
}

}  // namespace

TEST_CASE("walkthrough: disjoint tails") {
  const auto C = make_list(RankerLabel::Control, {a, b, c, d, e});
  const auto T = make_list(RankerLabel::Treatment, {b, c, a, f, g});
  const auto il = interleave(C, T, true);
  CHECK(render(il) == "a^C b^T c d^C f^T");
  CHECK(il.is_c_first);
}

TEST_CASE("walkthrough: rotation by one") {
  const auto C = make_list(RankerLabel::Control, {a, b, c, d});
  const auto T = make_list(RankerLabel::Treatment, {b, c, d, a});
  const auto il = interleave(C, T, true);
  CHECK(render(il) == "a^C b^T c d");
}

TEST_CASE("identical lists produce no competitive pairs") {
  const auto C = make_list(RankerLabel::Control, {a, b, c});
  const auto T = make_list(RankerLabel::Treatment, {a, b, c});
  const auto il = interleave(C, T, true);
  CHECK(render(il) == "a b c");
  for (const auto& entry : il.entries) CHECK_FALSE(entry.team.has_value());
}

TEST_CASE("treatment-first coin order") {
  const auto C = make_list(RankerLabel::Control, {a, b, c});
  const auto T = make_list(RankerLabel::Treatment, {b, a, c});
  const auto il = interleave(C, T, false);
  CHECK(render(il) == "b^T a^C c");
  CHECK_FALSE(il.is_c_first);
}

TEST_CASE("terminal pair is truncated to its first member") {
  const auto C = make_list(RankerLabel::Control, {a, b, c});
  const auto T = make_list(RankerLabel::Treatment, {d, e, f});
  const auto il = interleave(C, T, true);
  CHECK(render(il) == "a^C d^T b^C");
  CHECK(il.entries.size() == 3);
}

TEST_CASE("empty input yields empty output") {
  const auto C = make_list(RankerLabel::Control, {});
  const auto T = make_list(RankerLabel::Treatment, {a, b});
  CHECK(interleave(C, T, true).entries.empty());
  CHECK(interleave(T, C, false).entries.empty());
}

TEST_CASE("duplicate items within one list are rejected") {
  const auto C = make_list(RankerLabel::Control, {a, b, a});
  const auto T = make_list(RankerLabel::Treatment, {b, c, d});
  CHECK_THROWS_AS(interleave(C, T, true), ConfigError);
}

TEST_CASE("mismatched searches are rejected") {
  const auto C = make_list(RankerLabel::Control, {a, b}, 1);
  const auto T = make_list(RankerLabel::Treatment, {b, a}, 2);
  CHECK_THROWS_AS(interleave(C, T, true), ConfigError);
}

TEST_CASE("next_available scans strictly past the cursor") {
  const auto list = make_list(RankerLabel::Control, {a, b, c});
  InterleavedList merged;
  merged.search = SearchId{1};
  merged.entries = {{ListingId{a}, RankerLabel::Control},
                    {ListingId{b}, RankerLabel::Treatment}};
  CHECK(next_available(list, 0, merged) == 2);

  const auto single = make_list(RankerLabel::Control, {a});
  InterleavedList merged_a;
  merged_a.entries = {{ListingId{a}, std::nullopt}};
  CHECK_FALSE(next_available(single, 0, merged_a).has_value());

  const auto two = make_list(RankerLabel::Control, {a, b});
  InterleavedList empty;
  CHECK(next_available(two, 0, empty) == 1);
}

TEST_CASE("properties over random list pairs") {
  std::mt19937_64 rng(20240817);
  for (int trial = 0; trial < 500; ++trial) {
    const std::uint64_t pool = 2 + rng() % 30;
    const auto draw = [&](std::size_t len) {
      std::vector<std::uint64_t> ids(pool);
      for (std::uint64_t i = 0; i < pool; ++i) ids[i] = i + 1;
      std::shuffle(ids.begin(), ids.end(), rng);
      ids.resize(len);
      return ids;
    };
    const std::size_t len_c = 1 + rng() % pool;
    const std::size_t len_t = 1 + rng() % pool;
    const auto C = make_list(RankerLabel::Control, draw(len_c));
    const auto T = make_list(RankerLabel::Treatment, draw(len_t));
    const bool c_first = rng() % 2 == 0;

    const auto il = interleave(C, T, c_first);

    // length always equals min(l_c, l_t)
    REQUIRE(il.entries.size() == std::min(len_c, len_t));

    // no duplicates; tags trace back to the origin list
    std::unordered_set<std::uint64_t> seen;
    for (const auto& entry : il.entries) {
      CHECK(seen.insert(entry.listing.value).second);
      if (!entry.team) {
        CHECK(C.contains(entry.listing));
        CHECK(T.contains(entry.listing));
      } else if (*entry.team == RankerLabel::Control) {
        CHECK(C.contains(entry.listing));
      } else {
        CHECK(T.contains(entry.listing));
      }
    }

    // flipping the coin swaps the order inside every pair, nothing else
    const auto flipped = interleave(C, T, !c_first);
    REQUIRE(flipped.entries.size() == il.entries.size());
    std::size_t i = 0;
    while (i < il.entries.size()) {
      const auto& e0 = il.entries[i];
      const bool paired = e0.team && i + 1 < il.entries.size() &&
                          il.entries[i + 1].team &&
                          *il.entries[i + 1].team != *e0.team;
      if (paired) {
        CHECK(flipped.entries[i].listing == il.entries[i + 1].listing);
        CHECK(flipped.entries[i + 1].listing == il.entries[i].listing);
        i += 2;
      } else if (!e0.team) {
        CHECK(flipped.entries[i].listing == e0.listing);
        CHECK(!flipped.entries[i].team);
        i += 1;
      } else {
        // lone terminal member of a truncated pair: the flipped coin puts
        // the other team's item into that slot
        REQUIRE(i == il.entries.size() - 1);
        REQUIRE(flipped.entries[i].team.has_value());
        CHECK(*flipped.entries[i].team == opposite(*e0.team));
        i += 1;
      }
    }
  }
}
