#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankeval/core/records.hpp"
#include "rankeval/errors.hpp"

namespace rankeval {

inline constexpr int kLogSchemaVersion = 1;

using json = nlohmann::json;

inline json to_json(const RankedList& list) {
  json items = json::array();
  for (const auto& id : list.items) items.push_back(id.value);
  return json{{"ranker", to_string(list.ranker)},
              {"items", std::move(items)},
              {"search", list.search.value}};
}

inline RankedList ranked_list_from_json(const json& j) {
  RankedList list;
  list.ranker = ranker_label_from_string(j.at("ranker").get<std::string>());
  list.search = SearchId{j.at("search").get<std::uint64_t>()};
  for (const auto& v : j.at("items"))
    list.items.push_back(ListingId{v.get<std::uint64_t>()});
  return list;
}

inline json to_json(const InterleavedList& il) {
  json entries = json::array();
  for (const auto& e : il.entries) {
    json obj{{"listing", e.listing.value}};
    if (e.team) obj["team"] = to_string(*e.team);
    entries.push_back(std::move(obj));
  }
  return json{{"entries", std::move(entries)},
              {"is_c_first", il.is_c_first},
              {"search", il.search.value}};
}

inline InterleavedList interleaved_from_json(const json& j) {
  InterleavedList il;
  il.is_c_first = j.at("is_c_first").get<bool>();
  il.search = SearchId{j.at("search").get<std::uint64_t>()};
  for (const auto& e : j.at("entries")) {
    InterleavedEntry entry;
    entry.listing = ListingId{e.at("listing").get<std::uint64_t>()};
    if (e.contains("team"))
      entry.team = ranker_label_from_string(e.at("team").get<std::string>());
    il.entries.push_back(std::move(entry));
  }
  return il;
}

inline json to_json(const ExposureRecord& x) {
  json j{{"schema_version", kLogSchemaVersion},
         {"search", x.search.value},
         {"user", x.user.value},
         {"timestamp", x.timestamp},
         {"lane", x.lane},
         {"mode", to_string(x.mode)},
         {"list_control", to_json(x.list_control)},
         {"list_treatment", to_json(x.list_treatment)}};
  if (x.shown_ranker) j["shown_ranker"] = to_string(*x.shown_ranker);
  if (x.interleaved) j["interleaved"] = to_json(*x.interleaved);
  return j;
}

inline ExposureRecord exposure_from_json(const json& j) {
  ExposureRecord x;
  x.search = SearchId{j.at("search").get<std::uint64_t>()};
  x.user = UserId{j.at("user").get<std::uint64_t>()};
  x.timestamp = j.at("timestamp").get<Tick>();
  x.lane = j.at("lane").get<std::string>();
  x.mode = mode_from_string(j.at("mode").get<std::string>());
  x.list_control = ranked_list_from_json(j.at("list_control"));
  x.list_treatment = ranked_list_from_json(j.at("list_treatment"));
  if (j.contains("shown_ranker"))
    x.shown_ranker =
        ranker_label_from_string(j.at("shown_ranker").get<std::string>());
  if (j.contains("interleaved"))
    x.interleaved = interleaved_from_json(j.at("interleaved"));
  return x;
}

inline json to_json(const EventRecord& e) {
  return json{{"schema_version", kLogSchemaVersion},
              {"user", e.user.value},
              {"search", e.search.value},
              {"listing", e.listing.value},
              {"kind", to_string(e.kind)},
              {"timestamp", e.timestamp}};
}

inline EventRecord event_from_json(const json& j) {
  EventRecord e;
  e.user = UserId{j.at("user").get<std::uint64_t>()};
  e.search = SearchId{j.at("search").get<std::uint64_t>()};
  e.listing = ListingId{j.at("listing").get<std::uint64_t>()};
  e.kind = event_kind_from_string(j.at("kind").get<std::string>());
  e.timestamp = j.at("timestamp").get<Tick>();
  return e;
}

inline json to_json(const ValidationReport& r) {
  json issues = json::array();
  for (const auto& i : r.issues)
    issues.push_back(json{{"code", i.code}, {"detail", i.detail}});
  return json{{"issues", std::move(issues)},
              {"n_exposures", r.n_exposures},
              {"n_events", r.n_events},
              {"dropped_bookings", r.dropped_bookings}};
}

inline json to_json(const EstimateReport& r) {
  json j{{"metric_name", r.metric_name},
         {"tau_hat", r.tau_hat},
         {"baseline_mean", r.baseline_mean},
         {"p_value", r.p_value},
         {"n_units", r.n_units},
         {"variance", r.variance}};
  if (std::isnan(r.percent_delta))
    j["percent_delta"] = nullptr;
  else
    j["percent_delta"] = r.percent_delta;
  return j;
}

template <typename Record>
void write_jsonl(const std::string& path, std::span<const Record> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& r : records) {
    out << to_json(r).dump() << '\n';
    if (!out) throw IoError("write failure: " + path);
  }
}

namespace detail {

template <typename Record, typename FromJson>
std::vector<Record> read_jsonl(const std::string& path, FromJson&& parse) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<Record> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
      records.push_back(parse(j));
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return records;
}

}  // namespace detail

inline std::vector<ExposureRecord> read_exposures(const std::string& path) {
  return detail::read_jsonl<ExposureRecord>(
      path, [](const json& j) { return exposure_from_json(j); });
}

inline std::vector<EventRecord> read_events(const std::string& path) {
  return detail::read_jsonl<EventRecord>(
      path, [](const json& j) { return event_from_json(j); });
}

}  // namespace rankeval
