#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "rankeval/core/records.hpp"
#include "rankeval/counterfactual/hyperparams.hpp"
#include "rankeval/delivery/assignment.hpp"
#include "rankeval/errors.hpp"
#include "rankeval/sim/ranker.hpp"
#include "rankeval/sim/user_model.hpp"

namespace rankeval::sim {

struct CatalogSpec {
  std::uint64_t seed = 1;
  std::size_t n_listings = 200;
};

// Full deterministic description of one simulated experiment.
struct ExperimentConfig {
  std::string experiment_id = "exp";
  Mode mode = Mode::Interleaving;
  std::uint64_t master_seed = 1;
  std::int64_t n_users = 1000;
  int threads = 1;
  CatalogSpec catalog;
  std::size_t listings_per_search = 25;
  RankerSpec control;
  RankerSpec treatment;
  UserModel user_model;
  delivery::DeliveryConfig delivery;
  LaneId experiment_lane;
  cf::CfHyperparams cf_params;
  AttributionWindow window = AttributionWindow::all_in_period();
  EventKind preference_event_kind = EventKind::Booking;

  void validate() const {
    if (n_users < 1) throw ConfigError("n_users must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (listings_per_search < 1)
      throw ConfigError("listings_per_search must be >= 1");
    if (listings_per_search > catalog.n_listings)
      throw ConfigError("listings_per_search exceeds catalog size");
    control.validate();
    treatment.validate();
    if (control.label == treatment.label)
      throw ConfigError("control and treatment need distinct labels");
    user_model.validate();
    delivery.validate();
    cf_params.validate();
    if (mode != Mode::AB) {
      if (delivery.online_eval_fraction <= 0.0)
        throw ConfigError("online-eval mode requires online_eval_fraction > 0");
      bool found = false;
      for (const auto& lane : delivery.lanes)
        if (lane.id == experiment_lane) {
          found = true;
          if (lane.mode != mode)
            throw ConfigError("experiment lane mode differs from run mode");
        }
      if (!found)
        throw ConfigError("experiment_lane not present in delivery lanes");
    }
  }
};

namespace cfgjson {

using nlohmann::json;

inline json to_json(const RankerSpec& spec) {
  json j{{"label", spec.label}};
  switch (spec.kind) {
    case RankerSpec::Kind::NoisyUtility:
      j["kind"] = "NOISY_UTILITY";
      j["noise_sd"] = spec.noise_sd;
      break;
    case RankerSpec::Kind::RandomToTop:
      j["kind"] = "RANDOM_TO_TOP";
      j["base"] = to_json(*spec.base);
      break;
    case RankerSpec::Kind::DiversityRerank:
      j["kind"] = "DIVERSITY_RERANK";
      j["base"] = to_json(*spec.base);
      j["swap_depth"] = spec.swap_depth;
      j["penalty"] = spec.penalty;
      break;
    case RankerSpec::Kind::PositionSwap:
      j["kind"] = "POSITION_SWAP";
      j["base"] = to_json(*spec.base);
      j["i"] = spec.pos_i;
      j["j"] = spec.pos_j;
      break;
  }
  return j;
}

inline RankerSpec ranker_from_json(const json& j) {
  RankerSpec spec;
  const auto kind = j.at("kind").get<std::string>();
  spec.label = j.value("label", std::string("ranker"));
  if (kind == "NOISY_UTILITY") {
    spec.kind = RankerSpec::Kind::NoisyUtility;
    spec.noise_sd = j.value("noise_sd", 1.0);
  } else if (kind == "RANDOM_TO_TOP") {
    spec.kind = RankerSpec::Kind::RandomToTop;
    spec.base = std::make_shared<RankerSpec>(ranker_from_json(j.at("base")));
  } else if (kind == "DIVERSITY_RERANK") {
    spec.kind = RankerSpec::Kind::DiversityRerank;
    spec.base = std::make_shared<RankerSpec>(ranker_from_json(j.at("base")));
    spec.swap_depth = j.value("swap_depth", 3);
    spec.penalty = j.value("penalty", 0.1);
  } else if (kind == "POSITION_SWAP") {
    spec.kind = RankerSpec::Kind::PositionSwap;
    spec.base = std::make_shared<RankerSpec>(ranker_from_json(j.at("base")));
    spec.pos_i = j.value("i", 1);
    spec.pos_j = j.value("j", 2);
  } else {
    throw ConfigError("unknown ranker kind: " + kind);
  }
  return spec;
}

inline json to_json(const UserModel& m) {
  const char* kind = m.kind == UserModel::Kind::Cascade      ? "CASCADE"
                     : m.kind == UserModel::Kind::RandomClick ? "RANDOM_CLICK"
                                                              : "PAIR_LOCAL";
  return json{{"kind", kind},
              {"examination_decay", m.examination_decay},
              {"base_click", m.base_click},
              {"utility_sensitivity", m.utility_sensitivity},
              {"book_given_click", m.book_given_click},
              {"searches_per_journey", m.searches_per_journey}};
}

inline UserModel user_model_from_json(const json& j) {
  UserModel m;
  const auto kind = j.value("kind", std::string("CASCADE"));
  if (kind == "CASCADE")
    m.kind = UserModel::Kind::Cascade;
  else if (kind == "RANDOM_CLICK")
    m.kind = UserModel::Kind::RandomClick;
  else if (kind == "PAIR_LOCAL")
    m.kind = UserModel::Kind::PairLocal;
  else
    throw ConfigError("unknown user model kind: " + kind);
  m.examination_decay = j.value("examination_decay", m.examination_decay);
  m.base_click = j.value("base_click", m.base_click);
  m.utility_sensitivity = j.value("utility_sensitivity", m.utility_sensitivity);
  m.book_given_click = j.value("book_given_click", m.book_given_click);
  m.searches_per_journey =
      j.value("searches_per_journey", m.searches_per_journey);
  return m;
}

inline json to_json(const delivery::DeliveryConfig& d) {
  json lanes = json::array();
  for (const auto& lane : d.lanes)
    lanes.push_back(json{{"id", lane.id},
                         {"weight", lane.weight},
                         {"mode", to_string(lane.mode)}});
  return json{{"online_eval_fraction", d.online_eval_fraction},
              {"lanes", std::move(lanes)},
              {"layer1_salt", d.layer1_salt},
              {"layer2_salt", d.layer2_salt}};
}

inline delivery::DeliveryConfig delivery_from_json(const json& j) {
  delivery::DeliveryConfig d;
  d.online_eval_fraction = j.value("online_eval_fraction", 0.0);
  d.layer1_salt = j.value("layer1_salt", std::string("layer1"));
  d.layer2_salt = j.value("layer2_salt", std::string("layer2"));
  if (j.contains("lanes"))
    for (const auto& lj : j.at("lanes"))
      d.lanes.push_back({lj.at("id").get<std::string>(),
                         lj.value("weight", 1.0),
                         mode_from_string(lj.value("mode",
                                                   std::string("INTERLEAVING")))});
  return d;
}

inline json to_json(const cf::CfHyperparams& h) {
  return json{{"k", h.k},         {"alpha", h.alpha}, {"gamma", h.gamma},
              {"theta", h.theta}, {"beta1", h.beta1}, {"beta2", h.beta2}};
}

inline cf::CfHyperparams cf_from_json(const json& j) {
  cf::CfHyperparams h;
  h.k = j.value("k", h.k);
  h.alpha = j.value("alpha", h.alpha);
  h.gamma = j.value("gamma", h.gamma);
  h.theta = j.value("theta", h.theta);
  h.beta1 = j.value("beta1", h.beta1);
  h.beta2 = j.value("beta2", h.beta2);
  return h;
}

inline json to_json(const AttributionWindow& w) {
  switch (w.kind) {
    case AttributionWindow::Kind::AllInPeriod:
      return json{{"window", "ALL_IN_PERIOD"}};
    case AttributionWindow::Kind::LastSearch:
      return json{{"window", "LAST_SEARCH"}};
    case AttributionWindow::Kind::LastNTicks:
      return json{{"window", "LAST_N_TICKS"}, {"n_ticks", w.n_ticks}};
  }
  return json{{"window", "ALL_IN_PERIOD"}};
}

inline AttributionWindow window_from_json(const json& j) {
  const auto name = j.value("window", std::string("ALL_IN_PERIOD"));
  if (name == "ALL_IN_PERIOD") return AttributionWindow::all_in_period();
  if (name == "LAST_SEARCH") return AttributionWindow::last_search();
  if (name == "LAST_N_TICKS")
    return AttributionWindow::last_n_ticks(j.at("n_ticks").get<Tick>());
  throw ConfigError("unknown attribution window: " + name);
}

}  // namespace cfgjson

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  return nlohmann::json{
      {"schema_version", 1},
      {"experiment_id", cfg.experiment_id},
      {"mode", to_string(cfg.mode)},
      {"master_seed", cfg.master_seed},
      {"n_users", cfg.n_users},
      {"threads", cfg.threads},
      {"catalog",
       {{"seed", cfg.catalog.seed}, {"n_listings", cfg.catalog.n_listings}}},
      {"listings_per_search", cfg.listings_per_search},
      {"control", cfgjson::to_json(cfg.control)},
      {"treatment", cfgjson::to_json(cfg.treatment)},
      {"user_model", cfgjson::to_json(cfg.user_model)},
      {"delivery", cfgjson::to_json(cfg.delivery)},
      {"experiment_lane", cfg.experiment_lane},
      {"cf", cfgjson::to_json(cfg.cf_params)},
      {"attribution", cfgjson::to_json(cfg.window)},
      {"preference_event_kind", to_string(cfg.preference_event_kind)}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.experiment_id = j.value("experiment_id", std::string("exp"));
  cfg.mode = mode_from_string(j.value("mode", std::string("INTERLEAVING")));
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.n_users = j.value("n_users", std::int64_t{1000});
  cfg.threads = j.value("threads", 1);
  if (j.contains("catalog")) {
    cfg.catalog.seed = j.at("catalog").value("seed", std::uint64_t{1});
    cfg.catalog.n_listings =
        j.at("catalog").value("n_listings", std::size_t{200});
  }
  cfg.listings_per_search =
      j.value("listings_per_search", cfg.listings_per_search);
  cfg.control = cfgjson::ranker_from_json(j.at("control"));
  cfg.treatment = cfgjson::ranker_from_json(j.at("treatment"));
  if (j.contains("user_model"))
    cfg.user_model = cfgjson::user_model_from_json(j.at("user_model"));
  if (j.contains("delivery"))
    cfg.delivery = cfgjson::delivery_from_json(j.at("delivery"));
  cfg.experiment_lane = j.value("experiment_lane", std::string());
  if (j.contains("cf")) cfg.cf_params = cfgjson::cf_from_json(j.at("cf"));
  if (j.contains("attribution"))
    cfg.window = cfgjson::window_from_json(j.at("attribution"));
  cfg.preference_event_kind = event_kind_from_string(
      j.value("preference_event_kind", std::string("BOOKING")));
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  auto cfg = experiment_config_from_json(j);
  cfg.validate();
  return cfg;
}

}  // namespace rankeval::sim
