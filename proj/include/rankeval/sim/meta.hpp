#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "rankeval/sim/runner.hpp"
#include "rankeval/stats/correlation.hpp"

namespace rankeval::sim {

struct MetaOptions {
  std::int64_t ab_truth_users = 40000;  // large-sample ground truth arm
  std::int64_t eval_users = 4000;       // interleaving / counterfactual runs
  std::vector<int> alpha_sweep = {1, 2};
  std::vector<double> gamma_sweep = {0.9, 0.95};
};

struct MetaPairRow {
  std::string ranker_id;
  double treatment_noise_sd = 0.0;
  double m_ab = 0.0;  // ground-truth conversion delta
  std::map<std::string, double> m_eval;  // metric -> point estimate
};

struct MetaReport {
  std::vector<MetaPairRow> rows;
  std::map<std::string, double> correlations;          // metric -> corr
  std::map<std::string, double> agreement;             // metric -> directional
  // metric -> (column label -> corr), for the alpha / gamma sweeps
  std::map<std::string, std::map<std::string, double>> alpha_sweep;
  std::map<std::string, double> gamma_sweep;           // "gamma=0.95" -> corr
  std::vector<std::string> degenerate;                 // metrics with no corr
};

namespace metadetail {

inline std::vector<stats::PointEstimatePair> pairs_for(
    const MetaReport& report, const std::string& metric) {
  std::vector<stats::PointEstimatePair> out;
  for (const auto& row : report.rows) {
    const auto it = row.m_eval.find(metric);
    if (it == row.m_eval.end()) continue;
    out.push_back({row.ranker_id, it->second, row.m_ab});
  }
  return out;
}

// Re-aggregates the per-user position pairs under different hyperparameters
// without re-simulating anything.
inline std::vector<cf::UserCfAggregate> reaggregate(
    std::span<const analysis::UserAnalysis> analyses,
    const cf::CfHyperparams& h) {
  std::vector<cf::UserCfAggregate> aggs;
  aggs.reserve(analyses.size());
  for (const auto& ua : analyses) {
    cf::UserCfAggregate agg;
    agg.user = ua.user;
    agg.shown_ranker = ua.group;
    for (const auto& p : ua.positions) agg.add_event(p, h);
    aggs.push_back(agg);
  }
  return aggs;
}

}  // namespace metadetail

// Simulates a validation corpus: one (control, treatment) ranker pair per
// grid entry with the treatment's ranking noise swept across the grid, so
// true effects span both signs. Each pair gets a large-sample A/B ground
// truth plus interleaving and counterfactual evaluations, and the report
// correlates every evaluation metric against the ground truth.
inline MetaReport run_meta(const ExperimentConfig& base,
                           std::span<const double> effect_grid,
                           const MetaOptions& opt = {}) {
  if (effect_grid.size() < 3)
    throw ConfigError("run_meta: need at least 3 corpus entries");

  MetaReport report;
  const std::vector<std::string> cf_metrics = {
      "tau_decomp", "tau_diff", "tau_sim", "tau_g", "tau_win_loss", "tau_oec"};

  for (std::size_t i = 0; i < effect_grid.size(); ++i) {
    MetaPairRow row;
    row.ranker_id = "pair-" + std::to_string(i);
    row.treatment_noise_sd = effect_grid[i];

    ExperimentConfig cfg = base;
    cfg.experiment_id = base.experiment_id + "-" + row.ranker_id;
    cfg.master_seed = base.master_seed + 7919 * (i + 1);
    cfg.treatment.kind = RankerSpec::Kind::NoisyUtility;
    cfg.treatment.noise_sd = effect_grid[i];
    cfg.treatment.base.reset();

    // ground truth
    ExperimentConfig ab = cfg;
    ab.mode = Mode::AB;
    ab.n_users = opt.ab_truth_users;
    ab.delivery.online_eval_fraction = 0.0;
    ab.delivery.lanes.clear();
    ab.experiment_lane.clear();
    {
      const auto analyses = run_analyses(ab);
      const auto rep = report_from_analyses(ab, analyses);
      row.m_ab = rep.find("conversion")->tau_hat;
    }

    // interleaving
    ExperimentConfig il = cfg;
    il.mode = Mode::Interleaving;
    il.n_users = opt.eval_users;
    il.master_seed = cfg.master_seed + 1;
    il.delivery.online_eval_fraction = 1.0;
    il.experiment_lane = "lane-meta";
    il.delivery.lanes = {{il.experiment_lane, 1.0, Mode::Interleaving}};
    {
      const auto analyses = run_analyses(il);
      const auto rep = report_from_analyses(il, analyses);
      row.m_eval["tau_pref"] = rep.find("tau_pref")->tau_hat;
    }

    // counterfactual, default hyperparameters plus sweeps
    ExperimentConfig cfrun = cfg;
    cfrun.mode = Mode::Counterfactual;
    cfrun.n_users = opt.eval_users;
    cfrun.master_seed = cfg.master_seed + 2;
    cfrun.delivery.online_eval_fraction = 1.0;
    cfrun.experiment_lane = "lane-meta";
    cfrun.delivery.lanes = {{cfrun.experiment_lane, 1.0, Mode::Counterfactual}};
    {
      const auto analyses = run_analyses(cfrun);
      const auto rep = report_from_analyses(cfrun, analyses);
      for (const auto& m : cf_metrics)
        row.m_eval[m] = rep.find(m)->tau_hat;

      for (int alpha : opt.alpha_sweep) {
        cf::CfHyperparams h = cfrun.cf_params;
        h.alpha = alpha;
        const auto aggs = metadetail::reaggregate(analyses, h);
        const auto g = cf::tau_g(aggs, h, cfrun.experiment_id);
        const auto wl = cf::tau_win_loss(aggs, h, cfrun.experiment_id);
        const std::string col = "alpha=" + std::to_string(alpha);
        row.m_eval["tau_g|" + col] = g.tau_hat;
        row.m_eval["tau_win_loss|" + col] = wl.tau_hat;
      }
      for (double gamma : opt.gamma_sweep) {
        cf::CfHyperparams h = cfrun.cf_params;
        h.gamma = gamma;
        const auto aggs = metadetail::reaggregate(analyses, h);
        char col[32];
        std::snprintf(col, sizeof(col), "gamma=%.2f", gamma);
        row.m_eval[std::string("tau_g|") + col] =
            cf::tau_g(aggs, h, cfrun.experiment_id).tau_hat;
      }
    }
    report.rows.push_back(std::move(row));
  }

  // correlations and directional agreement per metric key
  std::set<std::string> keys;
  for (const auto& row : report.rows)
    for (const auto& [k, v] : row.m_eval) keys.insert(k);
  for (const auto& key : keys) {
    const auto pairs = metadetail::pairs_for(report, key);
    try {
      const double corr = stats::pearson_corr(pairs);
      const double agree = stats::directional_agreement(pairs);
      if (key.find('|') == std::string::npos) {
        report.correlations[key] = corr;
        report.agreement[key] = agree;
      } else {
        const auto bar = key.find('|');
        const std::string metric = key.substr(0, bar);
        const std::string col = key.substr(bar + 1);
        if (col.rfind("alpha=", 0) == 0)
          report.alpha_sweep[metric][col] = corr;
        else
          report.gamma_sweep[col] = corr;
      }
    } catch (const DegenerateStatistics&) {
      report.degenerate.push_back(key);
    }
  }
  return report;
}

}  // namespace rankeval::sim
