// Command-line front end: run simulated experiments, analyze logs, sweep a
// validation corpus, measure statistical power, and tune the attention
// decay. Exit codes: 0 success, 1 validation/config error, 2 I/O error,
// 3 statistical degeneracy.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankeval/analysis/analyze.hpp"
#include "rankeval/core/json_io.hpp"
#include "rankeval/errors.hpp"
#include "rankeval/sim/config.hpp"
#include "rankeval/sim/meta.hpp"
#include "rankeval/sim/power_streams.hpp"
#include "rankeval/sim/runner.hpp"
#include "rankeval/stats/gamma_fit.hpp"
#include "rankeval/stats/power.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rankeval;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failure: " + path);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void print_estimates(const analysis::AnalysisReport& report) {
  std::printf("%-14s %12s %10s %10s %10s\n", "metric", "estimate", "delta%",
              "p-value", "n");
  for (const auto& e : report.estimates) {
    if (std::isnan(e.percent_delta))
      std::printf("%-14s %12.6f %10s %10.4g %10lld\n", e.metric_name.c_str(),
                  e.tau_hat, "-", e.p_value,
                  static_cast<long long>(e.n_units));
    else
      std::printf("%-14s %12.6f %9.2f%% %10.4g %10lld\n",
                  e.metric_name.c_str(), e.tau_hat, 100.0 * e.percent_delta,
                  e.p_value, static_cast<long long>(e.n_units));
  }
  if (report.quality) {
    std::printf("\nquality (T vs C):\n");
    for (const auto& m : report.quality->metrics)
      std::printf("  %-22s %+7.2f%%  p=%.2f\n", m.name.c_str(),
                  std::isnan(m.delta_percent) ? 0.0 : 100.0 * m.delta_percent,
                  m.p_value);
  }
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, std::optional<int> threads) {
  auto cfg = sim::load_experiment_config(config_path);
  if (seed) cfg.master_seed = *seed;
  if (threads) cfg.threads = *threads;
  cfg.validate();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  auto result = sim::run_experiment(cfg);
  write_jsonl<ExposureRecord>((fs::path(out_dir) / "exposures.jsonl").string(),
                              result.exposures);
  write_jsonl<EventRecord>((fs::path(out_dir) / "events.jsonl").string(),
                           result.events);
  write_text((fs::path(out_dir) / "report.json").string(),
             analysis::to_json(result.report).dump(2) + "\n");

  std::printf("experiment %s: %lld users simulated, %zu exposures, %zu events\n",
              cfg.experiment_id.c_str(),
              static_cast<long long>(cfg.n_users), result.exposures.size(),
              result.events.size());
  print_estimates(result.report);
  return 0;
}

int cmd_analyze(const std::string& exposures_path,
                const std::string& events_path, const std::string& mode_name,
                const std::string& params_path, const std::string& out_path,
                const std::string& event_kind_name) {
  const Mode mode = mode_from_string(mode_name);
  cf::CfHyperparams params;
  AttributionWindow window = AttributionWindow::all_in_period();
  EventKind pref_kind = event_kind_from_string(event_kind_name);
  std::string experiment_id;
  if (!params_path.empty()) {
    const json pj = load_json(params_path);
    if (pj.contains("cf")) params = sim::cfgjson::cf_from_json(pj.at("cf"));
    if (pj.contains("attribution"))
      window = sim::cfgjson::window_from_json(pj.at("attribution"));
    if (pj.contains("preference_event_kind"))
      pref_kind = event_kind_from_string(
          pj.at("preference_event_kind").get<std::string>());
    experiment_id = pj.value("experiment_id", std::string());
  }
  params.validate();

  const auto exposures = read_exposures(exposures_path);
  const auto events = read_events(events_path);
  const auto report = analysis::analyze_log(exposures, events, mode, params,
                                            window, pref_kind, experiment_id);

  const std::string text = analysis::to_json(report).dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);

  if (!report.validation.ok()) {
    std::fprintf(stderr, "log validation found %zu issue(s)\n",
                 report.validation.issues.size());
    return 1;
  }
  if (!out_path.empty()) print_estimates(report);
  return 0;
}

sim::ExperimentConfig base_config_of(const json& j, const std::string& path) {
  if (!j.contains("base"))
    throw ConfigError(path + ": missing \"base\" experiment config");
  auto cfg = sim::experiment_config_from_json(j.at("base"));
  cfg.validate();
  return cfg;
}

int cmd_validate(const std::string& config_path, const std::string& out_dir) {
  const json j = load_json(config_path);
  auto base = base_config_of(j, config_path);

  std::vector<double> grid;
  if (j.contains("effect_grid")) {
    for (const auto& v : j.at("effect_grid")) grid.push_back(v.get<double>());
  } else {
    const int n = j.value("n_experiments", 30);
    const double lo = j.value("noise_min", 0.45);
    const double hi = j.value("noise_max", 2.2);
    if (n < 3) throw ConfigError("n_experiments must be >= 3");
    for (int i = 0; i < n; ++i)
      grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1));
  }

  sim::MetaOptions opt;
  opt.ab_truth_users = j.value("ab_truth_users", opt.ab_truth_users);
  opt.eval_users = j.value("eval_users", opt.eval_users);
  if (j.contains("alpha_sweep")) {
    opt.alpha_sweep.clear();
    for (const auto& v : j.at("alpha_sweep"))
      opt.alpha_sweep.push_back(v.get<int>());
  }
  if (j.contains("gamma_sweep")) {
    opt.gamma_sweep.clear();
    for (const auto& v : j.at("gamma_sweep"))
      opt.gamma_sweep.push_back(v.get<double>());
  }

  const auto report = sim::run_meta(base, grid, opt);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  json rows = json::array();
  std::vector<std::string> metric_names;
  for (const auto& [k, v] : report.correlations) metric_names.push_back(k);
  for (const auto& row : report.rows) {
    json r{{"ranker_id", row.ranker_id},
           {"treatment_noise_sd", row.treatment_noise_sd},
           {"m_ab", row.m_ab}};
    for (const auto& [k, v] : row.m_eval) r[k] = v;
    rows.push_back(std::move(r));
  }
  json out{{"rows", rows},
           {"correlations", report.correlations},
           {"directional_agreement", report.agreement},
           {"alpha_sweep", report.alpha_sweep},
           {"gamma_sweep", report.gamma_sweep},
           {"degenerate", report.degenerate}};
  write_text((fs::path(out_dir) / "meta_report.json").string(),
             out.dump(2) + "\n");

  // Table of metric correlations with the ground truth.
  {
    std::string csv = "metric,corr_with_ab,directional_agreement\n";
    for (const auto& [metric, corr] : report.correlations) {
      char line[160];
      std::snprintf(line, sizeof(line), "%s,%.4f,%.4f\n", metric.c_str(), corr,
                    report.agreement.at(metric));
      csv += line;
    }
    write_text((fs::path(out_dir) / "table2.csv").string(), csv);
  }
  // Alpha sweep columns.
  {
    std::string csv = "metric";
    for (int a : opt.alpha_sweep) csv += ",alpha=" + std::to_string(a);
    csv += "\n";
    for (const auto& [metric, cols] : report.alpha_sweep) {
      csv += metric;
      for (int a : opt.alpha_sweep) {
        const auto it = cols.find("alpha=" + std::to_string(a));
        char cell[32];
        std::snprintf(cell, sizeof(cell), ",%.4f",
                      it == cols.end() ? 0.0 : it->second);
        csv += cell;
      }
      csv += "\n";
    }
    write_text((fs::path(out_dir) / "table3.csv").string(), csv);
  }
  // Scatter of evaluation estimates against the ground truth.
  {
    std::string csv = "ranker_id,m_ab";
    for (const auto& m : metric_names) csv += "," + m;
    csv += "\n";
    for (const auto& row : report.rows) {
      char head[96];
      std::snprintf(head, sizeof(head), "%s,%.8f", row.ranker_id.c_str(),
                    row.m_ab);
      csv += head;
      for (const auto& m : metric_names) {
        char cell[40];
        const auto it = row.m_eval.find(m);
        std::snprintf(cell, sizeof(cell), ",%.8f",
                      it == row.m_eval.end() ? 0.0 : it->second);
        csv += cell;
      }
      csv += "\n";
    }
    write_text((fs::path(out_dir) / "scatter.csv").string(), csv);
  }

  std::printf("corpus size %zu\n", report.rows.size());
  std::printf("%-16s %10s %10s\n", "metric", "corr", "agree");
  for (const auto& [metric, corr] : report.correlations)
    std::printf("%-16s %10.3f %10.3f\n", metric.c_str(), corr,
                report.agreement.at(metric));

  for (const auto& key : report.degenerate)
    if (key == "tau_pref" || key == "tau_oec")
      throw DegenerateStatistics("correlation degenerate for " + key);
  return 0;
}

int cmd_power(const std::string& config_path, const std::string& metrics_csv,
              const std::string& out_path) {
  const json j = load_json(config_path);
  auto base = base_config_of(j, config_path);

  stats::PowerSpec spec;
  if (j.contains("power")) {
    const auto& p = j.at("power");
    spec.significance_level =
        p.value("significance_level", spec.significance_level);
    spec.power_target = p.value("power_target", spec.power_target);
    spec.effect = p.value("effect", spec.effect);
  }
  stats::PowerOptions opt;
  if (j.contains("options")) {
    const auto& o = j.at("options");
    opt.replications = o.value("replications", opt.replications);
    opt.grid_start = o.value("grid_start", opt.grid_start);
    opt.grid_max = o.value("grid_max", opt.grid_max);
  }

  std::vector<std::string> metrics;
  if (!metrics_csv.empty()) {
    std::string token;
    for (char c : metrics_csv + ",") {
      if (c == ',') {
        if (!token.empty()) metrics.push_back(token);
        token.clear();
      } else {
        token += c;
      }
    }
  } else if (j.contains("metrics")) {
    for (const auto& v : j.at("metrics"))
      metrics.push_back(v.get<std::string>());
  }
  if (metrics.empty())
    metrics = {"conversion", "tau_pref", "tau_oec"};

  json results = json::object();
  std::map<std::string, stats::PowerResult> by_metric;
  for (const auto& metric : metrics) {
    auto stream = sim::make_metric_stream(base, metric);
    const auto r = stats::min_sample_for_power(*stream, spec, opt);
    by_metric[metric] = r;
    results[metric] = json{{"reached", r.reached},
                           {"required_n", r.required_n},
                           {"rejection_rate", r.rejection_rate},
                           {"grid_max", r.grid_max}};
    if (r.reached)
      std::printf("%-14s required n = %lld (power %.2f)\n", metric.c_str(),
                  static_cast<long long>(r.required_n), r.rejection_rate);
    else
      std::printf("%-14s not reached at N_max = %lld (power %.2f)\n",
                  metric.c_str(), static_cast<long long>(r.grid_max),
                  r.rejection_rate);
  }

  json speedups = json::object();
  const auto ab = by_metric.find("conversion");
  if (ab != by_metric.end()) {
    for (const auto& [metric, r] : by_metric) {
      if (metric == "conversion" || !r.reached) continue;
      const double factor = static_cast<double>(ab->second.required_n) /
                            static_cast<double>(r.required_n);
      speedups[metric] = json{{"factor", factor},
                              {"at_least", !ab->second.reached}};
      std::printf("speedup %s vs conversion: %s%.1fx\n", metric.c_str(),
                  ab->second.reached ? "" : ">= ", factor);
    }
  }

  json out{{"power_spec",
            {{"significance_level", spec.significance_level},
             {"power_target", spec.power_target},
             {"effect", spec.effect}}},
           {"options",
            {{"replications", opt.replications},
             {"grid_start", opt.grid_start},
             {"grid_max", opt.grid_max}}},
           {"results", results},
           {"speedup_vs_ab", speedups}};
  if (!out_path.empty()) write_text(out_path, out.dump(2) + "\n");
  return 0;
}

int cmd_tune_gamma(const std::string& events_path,
                   const std::string& exposures_path,
                   const std::string& out_path) {
  const auto events = read_events(events_path);
  const auto exposures = read_exposures(exposures_path);

  std::unordered_map<SearchId, const ExposureRecord*> by_search;
  for (const auto& x : exposures) by_search.emplace(x.search, &x);

  std::map<int, double> histogram;
  for (const auto& e : events) {
    if (e.kind != EventKind::Click) continue;
    const auto it = by_search.find(e.search);
    if (it == by_search.end()) continue;
    const int rank = it->second->shown_rank_of(e.listing);
    if (rank > 0) histogram[rank] += 1.0;
  }

  double gamma_0 = 0.0;
  try {
    gamma_0 = stats::fit_gamma(histogram);
  } catch (const DegenerateStatistics& e) {
    // degenerate click histogram is an input-data problem for this command
    throw ConfigError(e.what());
  }
  const auto grid = stats::gamma_candidate_grid(gamma_0);

  json out{{"gamma_0", gamma_0}, {"candidate_grid", grid}};
  json hist = json::object();
  for (const auto& [rank, count] : histogram)
    hist[std::to_string(rank)] = count;
  out["click_histogram"] = std::move(hist);

  const std::string text = out.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
  std::printf("gamma_0 = %.4f, grid:", gamma_0);
  for (double g : grid) std::printf(" %.4f", g);
  std::printf("\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ranking experimentation engine"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path;
  std::string exposures_path, events_path, mode_name = "INTERLEAVING";
  std::string params_path, metrics_csv, event_kind = "BOOKING";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;

  auto* run = app.add_subcommand("run", "simulate an experiment");
  run->add_option("--config", config_path, "experiment config JSON")
      ->required();
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--threads", threads, "simulation threads");

  auto* analyze = app.add_subcommand("analyze", "compute metrics from logs");
  analyze->add_option("--exposures", exposures_path, "exposures.jsonl")
      ->required();
  analyze->add_option("--events", events_path, "events.jsonl")->required();
  analyze->add_option("--mode", mode_name, "AB|INTERLEAVING|COUNTERFACTUAL")
      ->required();
  analyze->add_option("--params", params_path, "analysis parameters JSON");
  analyze->add_option("--out", out_path, "report path (default: stdout)");
  analyze->add_option("--event-kind", event_kind,
                      "event kind feeding tau_pref (CLICK|BOOKING)");

  auto* validate = app.add_subcommand("validate", "meta-experiment corpus");
  validate->add_option("--config", config_path, "meta config JSON")
      ->required();
  validate->add_option("--out", out_dir, "output directory")->required();

  auto* power = app.add_subcommand("power", "required-n and speedup table");
  power->add_option("--config", config_path, "power config JSON")->required();
  power->add_option("--metrics", metrics_csv, "comma-separated metric list");
  power->add_option("--out", out_path, "result JSON path");

  auto* tune = app.add_subcommand("tune-gamma", "fit the attention decay");
  tune->add_option("--events", events_path, "events.jsonl")->required();
  tune->add_option("--exposures", exposures_path,
                   "exposures.jsonl (rank lookup)")
      ->required();
  tune->add_option("--out", out_path, "result JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out_dir, threads);
    if (analyze->parsed())
      return cmd_analyze(exposures_path, events_path, mode_name, params_path,
                         out_path, event_kind);
    if (validate->parsed()) return cmd_validate(config_path, out_dir);
    if (power->parsed()) return cmd_power(config_path, metrics_csv, out_path);
    if (tune->parsed())
      return cmd_tune_gamma(events_path, exposures_path, out_path);
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const DegenerateStatistics& e) {
    std::fprintf(stderr, "degenerate statistics: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
