#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rankeval/core/attribution.hpp"
#include "rankeval/core/records.hpp"
#include "rankeval/stats/tests.hpp"

namespace rankeval::interleaving {

// Per-user win counts over competitive pairs.
struct PairCredit {
  UserId user;
  std::uint64_t wins_c = 0;
  std::uint64_t wins_t = 0;
};

struct PreferenceResult {
  double tau_pref = 0.0;
  std::int64_t n_prefer_t = 0;
  std::int64_t n_prefer_c = 0;
  std::int64_t n_tied = 0;
  std::int64_t n_users = 0;
  double p_value = 1.0;
};

// Credits each attributed event of the requested kind to the team of the
// tagged entry it landed on; events on untagged entries carry no preference
// signal. Returns one PairCredit per user that had at least one credited or
// considered event; the caller merges in event-less users as ties.
inline std::vector<PairCredit> credit_events(
    std::span<const AttributedEvent> attributed, EventKind kind,
    std::vector<std::string>* diagnostics = nullptr) {
  std::map<UserId, PairCredit> by_user;
  for (const auto& a : attributed) {
    if (a.event.kind != kind) continue;
    const ExposureRecord& x = *a.exposure;
    if (x.mode != Mode::Interleaving || !x.interleaved) continue;
    auto& credit = by_user[a.event.user];
    credit.user = a.event.user;
    const auto team = x.interleaved->team_of(a.event.listing);
    if (!x.interleaved->contains(a.event.listing)) {
      if (diagnostics)
        diagnostics->push_back("event listing " +
                               std::to_string(a.event.listing.value) +
                               " not in interleaved list, skipped");
      continue;
    }
    if (!team) continue;  // drafted by both sides, no preference inferred
    if (*team == RankerLabel::Control)
      ++credit.wins_c;
    else
      ++credit.wins_t;
  }
  std::vector<PairCredit> out;
  out.reserve(by_user.size());
  for (auto& [user, credit] : by_user) out.push_back(credit);
  return out;
}

// Preference statistic: per user tau_i = wins_t - wins_c, the share
// difference of users preferring each side over all users (ties included in
// the denominator), with a two-sided proportion test on the non-tied users
// against a null of 0.5.
inline PreferenceResult preference_stat(std::span<const PairCredit> credits) {
  if (credits.empty())
    throw DegenerateStatistics("preference_stat: zero users");
  PreferenceResult r;
  r.n_users = static_cast<std::int64_t>(credits.size());
  for (const auto& c : credits) {
    const auto tau_i = static_cast<std::int64_t>(c.wins_t) -
                       static_cast<std::int64_t>(c.wins_c);
    if (tau_i > 0)
      ++r.n_prefer_t;
    else if (tau_i < 0)
      ++r.n_prefer_c;
    else
      ++r.n_tied;
  }
  r.tau_pref = static_cast<double>(r.n_prefer_t - r.n_prefer_c) /
               static_cast<double>(r.n_users);
  r.p_value =
      stats::two_proportion_test(r.n_prefer_t, r.n_prefer_t + r.n_prefer_c, 0.5);
  return r;
}

}  // namespace rankeval::interleaving
