#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rankeval/core/attribution.hpp"
#include "rankeval/core/json_io.hpp"
#include "rankeval/core/records.hpp"
#include "rankeval/core/validation.hpp"
#include "rankeval/counterfactual/estimators.hpp"
#include "rankeval/interleave/preference.hpp"
#include "rankeval/interleave/quality.hpp"
#include "rankeval/stats/tests.hpp"

namespace rankeval::analysis {

// Reserved lane id for the regular A/B portion of traffic.
inline constexpr const char* kAbLane = "ab";

struct AnalysisReport {
  Mode mode = Mode::AB;
  std::string experiment_id;
  std::int64_t n_users = 0;  // experiment participants
  ValidationReport validation;
  std::vector<EstimateReport> estimates;
  std::optional<interleaving::PreferenceResult> preference;
  std::optional<interleaving::QualityReport> quality;

  const EstimateReport* find(const std::string& metric) const {
    for (const auto& e : estimates)
      if (e.metric_name == metric) return &e;
    return nullptr;
  }
};

// Everything the estimators need from one participant, independent of every
// other user; aggregation across users is a plain merge.
struct UserAnalysis {
  UserId user;
  RankerLabel group = RankerLabel::Control;  // AB / counterfactual arm
  bool converted = false;                    // any booking
  interleaving::PairCredit credit;
  interleaving::QualityTally quality;
  cf::UserCfAggregate cf_agg;
  std::vector<cf::PositionPair> positions;   // kept for hyperparameter sweeps
};

// Builds one participant's analysis from their own records. `exposures` and
// `attributed` must already be restricted to the experiment's records for
// this user.
inline UserAnalysis build_user_analysis(
    UserId user, Mode mode, std::span<const ExposureRecord* const> exposures,
    std::span<const AttributedEvent> attributed,
    const cf::CfHyperparams& params, EventKind preference_kind) {
  UserAnalysis ua;
  ua.user = user;
  ua.credit.user = user;
  ua.cf_agg.user = user;

  if (mode != Mode::Interleaving && !exposures.empty() &&
      exposures.front()->shown_ranker)
    ua.group = *exposures.front()->shown_ranker;
  ua.cf_agg.shown_ranker = ua.group;

  if (mode == Mode::Interleaving) {
    std::set<std::pair<int, std::uint64_t>> found;  // (team, listing)
    for (const ExposureRecord* x : exposures)
      if (x->interleaved) interleaving::tally_exposure(*x->interleaved, ua.quality);
    for (const auto& a : attributed) {
      if (a.event.kind == EventKind::Booking) ua.converted = true;
      const auto& x = *a.exposure;
      if (!x.interleaved) continue;
      const auto team = x.interleaved->team_of(a.event.listing);
      if (a.event.kind == EventKind::Click && team)
        found.insert({static_cast<int>(*team), a.event.listing.value});
      if (a.event.kind != preference_kind || !team) continue;
      if (*team == RankerLabel::Control)
        ++ua.credit.wins_c;
      else
        ++ua.credit.wins_t;
    }
    for (const auto& [team, listing] : found) {
      if (team == static_cast<int>(RankerLabel::Control))
        ua.quality.listings_found_c += 1;
      else
        ua.quality.listings_found_t += 1;
    }
    return ua;
  }

  for (const auto& a : attributed) {
    if (a.event.kind != EventKind::Booking) continue;
    ua.converted = true;
    if (mode != Mode::Counterfactual) continue;
    const auto& x = *a.exposure;
    if (!x.shown_ranker) continue;
    const RankedList& shown = x.list_for(*x.shown_ranker);
    const RankedList& counter = x.list_for(opposite(*x.shown_ranker));
    const auto p = cf::locate_positions(a.event.listing, shown, counter);
    ua.positions.push_back(p);
    ua.cf_agg.add_event(p, params);
  }
  return ua;
}

// Mergeable cross-user state; the log analyzer and the in-memory simulation
// paths both funnel through this, so they produce identical reports.
struct MetricsAggregator {
  Mode mode = Mode::AB;
  std::string experiment_id;
  cf::CfHyperparams params;

  std::int64_t n_participants = 0;
  stats::Accumulator conv_c, conv_t;
  std::vector<interleaving::PairCredit> credits;      // interleaving
  interleaving::QualityAccumulator quality;           // interleaving
  std::vector<cf::UserCfAggregate> cf_aggs;         // counterfactual

  void add_user(const UserAnalysis& ua) {
    ++n_participants;
    if (mode == Mode::Interleaving) {
      credits.push_back(ua.credit);
      quality.add(ua.quality);
      return;
    }
    if (ua.group == RankerLabel::Treatment)
      conv_t.add(ua.converted ? 1.0 : 0.0);
    else
      conv_c.add(ua.converted ? 1.0 : 0.0);
    if (mode == Mode::Counterfactual) cf_aggs.push_back(ua.cf_agg);
  }

  void merge(MetricsAggregator&& o) {
    n_participants += o.n_participants;
    conv_c.merge(o.conv_c);
    conv_t.merge(o.conv_t);
    credits.insert(credits.end(), o.credits.begin(), o.credits.end());
    quality.merge(o.quality);
    cf_aggs.insert(cf_aggs.end(),
                   std::make_move_iterator(o.cf_aggs.begin()),
                   std::make_move_iterator(o.cf_aggs.end()));
  }
};

inline EstimateReport preference_estimate(
    const interleaving::PreferenceResult& pref, const std::string& experiment_id) {
  EstimateReport r;
  r.metric_name = "tau_pref";
  r.experiment_id = experiment_id;
  r.tau_hat = pref.tau_pref;
  r.baseline_mean = static_cast<double>(pref.n_prefer_c) /
                    static_cast<double>(pref.n_users);
  r.percent_delta = stats::percent_delta_or_nan(r.tau_hat, r.baseline_mean);
  r.p_value = pref.p_value;
  r.n_units = pref.n_users;
  const double n = static_cast<double>(pref.n_users);
  const double mean = pref.tau_pref;
  const double ex2 =
      static_cast<double>(pref.n_prefer_t + pref.n_prefer_c) / n;
  if (pref.n_users > 1) {
    const double sample_var = (ex2 - mean * mean) * n / (n - 1.0);
    r.variance = sample_var / n;
  }
  return r;
}

inline EstimateReport conversion_estimate(const stats::Accumulator& treat,
                                          const stats::Accumulator& control,
                                          const std::string& experiment_id) {
  const auto tt = stats::welch_or_untestable(treat.summary(), control.summary());
  EstimateReport r;
  r.metric_name = "conversion";
  r.experiment_id = experiment_id;
  r.tau_hat = tt.delta;
  r.baseline_mean = control.mean();
  r.percent_delta = stats::percent_delta_or_nan(r.tau_hat, r.baseline_mean);
  r.p_value = tt.p_value;
  r.n_units = treat.n + control.n;
  r.variance = tt.se * tt.se;
  return r;
}

inline AnalysisReport finalize_report(const MetricsAggregator& agg,
                                      ValidationReport validation = {}) {
  AnalysisReport report;
  report.mode = agg.mode;
  report.experiment_id = agg.experiment_id;
  report.n_users = agg.n_participants;
  report.validation = std::move(validation);

  if (agg.mode == Mode::Interleaving) {
    const auto pref = interleaving::preference_stat(agg.credits);
    report.preference = pref;
    report.estimates.push_back(preference_estimate(pref, agg.experiment_id));
    report.quality = agg.quality.report();
    return report;
  }

  report.estimates.push_back(
      conversion_estimate(agg.conv_t, agg.conv_c, agg.experiment_id));
  if (agg.mode == Mode::Counterfactual) {
    const auto& h = agg.params;
    const auto decomp = cf::tau_decomp(agg.cf_aggs, h, agg.experiment_id);
    const auto g = cf::tau_g(agg.cf_aggs, h, agg.experiment_id);
    report.estimates.push_back(decomp);
    report.estimates.push_back(cf::tau_diff(agg.cf_aggs, agg.experiment_id));
    report.estimates.push_back(cf::tau_sim(agg.cf_aggs, agg.experiment_id));
    report.estimates.push_back(g);
    report.estimates.push_back(
        cf::tau_win_loss(agg.cf_aggs, h, agg.experiment_id));
    report.estimates.push_back(cf::tau_oec(decomp, g, agg.cf_aggs, h));
  }
  return report;
}

// True when the exposure belongs to the experiment under analysis.
inline bool is_participant_exposure(const ExposureRecord& x, Mode mode) {
  if (x.mode != mode) return false;
  if (mode == Mode::AB) return x.lane == kAbLane;
  return true;
}

// Full log analysis: validates, attributes, folds each user and builds the
// metric report for the requested mode.
inline AnalysisReport analyze_log(std::span<const ExposureRecord> exposures,
                                  std::span<const EventRecord> events,
                                  Mode mode, const cf::CfHyperparams& params,
                                  const AttributionWindow& window,
                                  EventKind preference_kind,
                                  const std::string& experiment_id = "") {
  auto validation = validate_log(exposures, events);
  auto attribution = attribute_events(events, exposures, window);
  validation.dropped_bookings = attribution.dropped_bookings;

  std::map<UserId, std::vector<const ExposureRecord*>> user_exposures;
  for (const auto& x : exposures)
    if (is_participant_exposure(x, mode)) user_exposures[x.user].push_back(&x);

  std::map<UserId, std::vector<AttributedEvent>> user_pairs;
  for (const auto& a : attribution.pairs)
    if (is_participant_exposure(*a.exposure, mode))
      user_pairs[a.event.user].push_back(a);

  MetricsAggregator agg;
  agg.mode = mode;
  agg.experiment_id = experiment_id;
  agg.params = params;
  for (const auto& [user, xs] : user_exposures) {
    const auto it = user_pairs.find(user);
    const std::span<const AttributedEvent> pairs =
        it == user_pairs.end() ? std::span<const AttributedEvent>{}
                               : std::span<const AttributedEvent>(it->second);
    agg.add_user(
        build_user_analysis(user, mode, xs, pairs, params, preference_kind));
  }
  if (agg.n_participants == 0)
    throw DegenerateStatistics("analyze_log: no participant exposures for " +
                               std::string(to_string(mode)));
  return finalize_report(agg, std::move(validation));
}

inline nlohmann::json to_json(const interleaving::QualityReport& q) {
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& m : q.metrics) {
    nlohmann::json entry{{"mean_c", m.mean_c},
                         {"mean_t", m.mean_t},
                         {"p_value", m.p_value},
                         {"se", m.se}};
    if (std::isnan(m.delta_percent))
      entry["delta_percent"] = nullptr;
    else
      entry["delta_percent"] = m.delta_percent;
    metrics[m.name] = std::move(entry);
  }
  return nlohmann::json{{"metrics", std::move(metrics)},
                        {"n_users", q.n_users}};
}

inline nlohmann::json to_json(const interleaving::PreferenceResult& p) {
  return nlohmann::json{{"tau_pref", p.tau_pref},
                        {"n_prefer_t", p.n_prefer_t},
                        {"n_prefer_c", p.n_prefer_c},
                        {"n_tied", p.n_tied},
                        {"n_users", p.n_users},
                        {"p_value", p.p_value}};
}

inline nlohmann::json to_json(const AnalysisReport& r) {
  nlohmann::json estimates = nlohmann::json::object();
  for (const auto& e : r.estimates) estimates[e.metric_name] = rankeval::to_json(e);
  nlohmann::json j{{"mode", to_string(r.mode)},
                   {"experiment_id", r.experiment_id},
                   {"n_users", r.n_users},
                   {"estimates", std::move(estimates)},
                   {"validation", rankeval::to_json(r.validation)}};
  if (r.preference) j["preference"] = to_json(*r.preference);
  if (r.quality) j["quality"] = to_json(*r.quality);
  return j;
}

}  // namespace rankeval::analysis
