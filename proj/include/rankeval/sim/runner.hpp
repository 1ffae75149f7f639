#pragma once

#include <algorithm>
#include <memory>
#include <thread>
#include <vector>

#include "rankeval/analysis/analyze.hpp"
#include "rankeval/core/attribution.hpp"
#include "rankeval/core/validation.hpp"
#include "rankeval/delivery/assignment.hpp"
#include "rankeval/interleave/team_draft.hpp"
#include "rankeval/sim/catalog.hpp"
#include "rankeval/sim/config.hpp"
#include "rankeval/sim/ranker.hpp"
#include "rankeval/sim/user_model.hpp"

namespace rankeval::sim {

struct RunResult {
  std::vector<ExposureRecord> exposures;
  std::vector<EventRecord> events;
  analysis::AnalysisReport report;
};

namespace rundetail {

struct UserOutput {
  std::vector<ExposureRecord> exposures;
  std::vector<EventRecord> events;
  bool participant = false;
  analysis::UserAnalysis analysis;
};

struct Routing {
  bool participant = false;
  LaneId lane;
  Mode mode = Mode::AB;
};

inline Routing route_user(const ExperimentConfig& cfg, UserId uid) {
  Routing r;
  if (delivery::layer1_assign(uid, cfg.delivery) == delivery::Layer1::AB) {
    r.lane = analysis::kAbLane;
    if (cfg.mode == Mode::AB) {
      r.participant = true;
      r.mode = Mode::AB;
    }
    return r;
  }
  const auto& lane = delivery::layer2_assign(uid, cfg.delivery);
  r.lane = lane.id;
  if (cfg.mode != Mode::AB && lane.id == cfg.experiment_lane) {
    r.participant = true;
    r.mode = cfg.mode;
  }
  return r;
}

// Draws the journey's candidate set: the same listings are re-ranked on
// every search of the journey, which is what lets a booked listing appear
// in several searches and exercise multi-exposure attribution.
inline std::vector<Listing> draw_candidates(const ExperimentConfig& cfg,
                                            const Catalog& catalog,
                                            std::uint64_t user_ordinal) {
  const std::size_t n = catalog.listings.size();
  const std::size_t k = cfg.listings_per_search;
  auto rng = Rng::keyed(cfg.master_seed, Stream::Candidates, user_ordinal);
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  std::vector<Listing> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.next_index(n - i));
    std::swap(idx[i], idx[j]);
    out.push_back(catalog.listings[idx[i]]);
  }
  return out;
}

// Simulates one user's whole journey. `forced_participation` bypasses the
// delivery layers (used by power streams, which meter experiment traffic
// directly). Everything is keyed off (master_seed, user_ordinal), so a
// user's outcome never depends on how many other users exist.
inline UserOutput simulate_user_journey(const ExperimentConfig& cfg,
                                        const Catalog& catalog,
                                        std::uint64_t user_ordinal,
                                        bool keep_records,
                                        bool forced_participation = false) {
  UserOutput out;
  const UserId uid{user_ordinal + 1};

  Routing routing;
  if (forced_participation) {
    routing.participant = true;
    routing.mode = cfg.mode;
    routing.lane = cfg.mode == Mode::AB ? LaneId(analysis::kAbLane)
                                        : cfg.experiment_lane;
  } else {
    routing = route_user(cfg, uid);
  }
  out.participant = routing.participant;

  const auto candidates = draw_candidates(cfg, catalog, user_ordinal);
  auto behavior_rng = Rng::keyed(cfg.master_seed, Stream::Behavior, user_ordinal);
  JourneyState journey;

  const RankerLabel user_arm = delivery::coin_flip_user(uid, cfg.experiment_id);

  for (int s = 0; s < cfg.user_model.searches_per_journey; ++s) {
    if (journey.booked) break;
    const SearchId sid{user_ordinal *
                           static_cast<std::uint64_t>(
                               cfg.user_model.searches_per_journey) +
                       static_cast<std::uint64_t>(s) + 1};
    const Tick base_tick = static_cast<Tick>(sid.value) * 100;

    ExposureRecord x;
    x.search = sid;
    x.user = uid;
    x.timestamp = base_tick;
    x.lane = routing.lane;
    x.list_control = rank(cfg.control, candidates, cfg.master_seed, sid.value,
                          RankerLabel::Control, sid);
    x.list_treatment = rank(cfg.treatment, candidates, cfg.master_seed,
                            sid.value, RankerLabel::Treatment, sid);

    std::vector<ShownItem> shown;
    bool is_interleaved = false;
    if (routing.participant && cfg.mode == Mode::Interleaving) {
      x.mode = Mode::Interleaving;
      const bool c_first = delivery::coin_flip_search(sid, cfg.experiment_id);
      x.interleaved = interleaving::interleave(x.list_control, x.list_treatment,
                                             c_first);
      is_interleaved = true;
      shown.reserve(x.interleaved->entries.size());
      for (const auto& e : x.interleaved->entries)
        shown.push_back({e.listing, catalog.utility_of(e.listing), e.team});
    } else {
      x.mode = Mode::AB;
      RankerLabel w = RankerLabel::Control;
      if (routing.participant) {
        w = user_arm;
        if (cfg.mode == Mode::Counterfactual) x.mode = Mode::Counterfactual;
      }
      x.shown_ranker = w;
      const auto& list = x.list_for(w);
      shown.reserve(list.items.size());
      for (const auto& id : list.items)
        shown.push_back({id, catalog.utility_of(id), std::nullopt});
    }

    simulate_impression(shown, is_interleaved, cfg.user_model, behavior_rng,
                        journey, uid, sid, base_tick, out.events);
    out.exposures.push_back(std::move(x));
  }

  if (routing.participant) {
    const auto attribution =
        attribute_events(out.events, out.exposures, cfg.window);
    std::vector<const ExposureRecord*> xs;
    xs.reserve(out.exposures.size());
    for (const auto& x : out.exposures) xs.push_back(&x);
    out.analysis = analysis::build_user_analysis(
        uid, cfg.mode, xs, attribution.pairs, cfg.cf_params,
        cfg.preference_event_kind);
  }
  if (!keep_records) {
    out.exposures.clear();
    out.events.clear();
  }
  return out;
}

template <typename PerUser>
void for_each_user_parallel(std::int64_t n_users, int threads, PerUser&& fn) {
  if (threads <= 1 || n_users < 2 * threads) {
    for (std::int64_t i = 0; i < n_users; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (n_users + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = t * chunk;
    const std::int64_t hi = std::min(n_users, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rundetail

// Per-user analyses for every participant, in user order. The heavy
// simulation runs under cfg.threads; the final fold is sequential, so the
// report is bit-identical for any thread count.
inline std::vector<analysis::UserAnalysis> run_analyses(
    const ExperimentConfig& cfg, bool forced_participation = false) {
  cfg.validate();
  const Catalog catalog = gen_catalog(cfg.catalog.seed, cfg.catalog.n_listings);
  std::vector<std::unique_ptr<rundetail::UserOutput>> outputs(
      static_cast<std::size_t>(cfg.n_users));
  rundetail::for_each_user_parallel(
      cfg.n_users, cfg.threads, [&](std::int64_t i) {
        outputs[static_cast<std::size_t>(i)] =
            std::make_unique<rundetail::UserOutput>(
                rundetail::simulate_user_journey(
                    cfg, catalog, static_cast<std::uint64_t>(i),
                    /*keep_records=*/false, forced_participation));
      });
  std::vector<analysis::UserAnalysis> analyses;
  analyses.reserve(outputs.size());
  for (auto& o : outputs)
    if (o->participant) analyses.push_back(std::move(o->analysis));
  return analyses;
}

inline analysis::AnalysisReport report_from_analyses(
    const ExperimentConfig& cfg,
    std::span<const analysis::UserAnalysis> analyses,
    ValidationReport validation = {}) {
  analysis::MetricsAggregator agg;
  agg.mode = cfg.mode;
  agg.experiment_id = cfg.experiment_id;
  agg.params = cfg.cf_params;
  for (const auto& ua : analyses) agg.add_user(ua);
  return analysis::finalize_report(agg, std::move(validation));
}

// Simulates the full experiment and keeps the logs. Records are assembled
// in user order whatever the thread count, so outputs are byte-stable.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Catalog catalog = gen_catalog(cfg.catalog.seed, cfg.catalog.n_listings);
  std::vector<std::unique_ptr<rundetail::UserOutput>> outputs(
      static_cast<std::size_t>(cfg.n_users));
  rundetail::for_each_user_parallel(
      cfg.n_users, cfg.threads, [&](std::int64_t i) {
        outputs[static_cast<std::size_t>(i)] =
            std::make_unique<rundetail::UserOutput>(
                rundetail::simulate_user_journey(cfg, catalog,
                                                 static_cast<std::uint64_t>(i),
                                                 /*keep_records=*/true));
      });

  RunResult result;
  std::vector<analysis::UserAnalysis> analyses;
  for (auto& o : outputs) {
    if (o->participant) analyses.push_back(std::move(o->analysis));
    result.exposures.insert(result.exposures.end(),
                            std::make_move_iterator(o->exposures.begin()),
                            std::make_move_iterator(o->exposures.end()));
    result.events.insert(result.events.end(),
                         std::make_move_iterator(o->events.begin()),
                         std::make_move_iterator(o->events.end()));
  }
  auto validation = validate_log(result.exposures, result.events);
  result.report = report_from_analyses(cfg, analyses, std::move(validation));
  return result;
}

}  // namespace rankeval::sim
