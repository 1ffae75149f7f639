#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rankeval/sim/runner.hpp"
#include "rankeval/stats/power.hpp"

namespace rankeval::sim {

// Metric stream backed by the full simulation pipeline: each replication
// simulates n fresh experiment participants (delivery layers bypassed; the
// grid meters experiment traffic directly) and reruns the real attribution,
// credit and estimator code to obtain the metric's p-value.
class SimMetricStream final : public stats::MetricStream {
 public:
  SimMetricStream(ExperimentConfig cfg, std::string metric)
      : cfg_(std::move(cfg)),
        metric_(std::move(metric)),
        catalog_(gen_catalog(cfg_.catalog.seed, cfg_.catalog.n_listings)) {
    cfg_.validate();
  }

  std::string name() const override { return metric_; }

  double replicate_p_value(std::uint64_t replication,
                           std::int64_t n_users) override {
    ExperimentConfig cfg = cfg_;
    // Fresh arm assignments and coins per replication.
    cfg.experiment_id =
        cfg_.experiment_id + "#rep" + std::to_string(replication);
    analysis::MetricsAggregator agg;
    agg.mode = cfg.mode;
    agg.experiment_id = cfg.experiment_id;
    agg.params = cfg.cf_params;
    for (std::int64_t i = 0; i < n_users; ++i) {
      const std::uint64_t ordinal = rngdetail::mix64(
          rngdetail::mix64(replication + 1) + static_cast<std::uint64_t>(i));
      auto out = rundetail::simulate_user_journey(cfg, catalog_, ordinal,
                                                  /*keep_records=*/false,
                                                  /*forced_participation=*/true);
      agg.add_user(out.analysis);
    }
    const auto report = analysis::finalize_report(agg);
    const auto* est = report.find(metric_);
    if (!est)
      throw ConfigError("metric not produced by mode " +
                        std::string(to_string(cfg.mode)) + ": " + metric_);
    return est->p_value;
  }

 private:
  ExperimentConfig cfg_;
  std::string metric_;
  Catalog catalog_;
};

// Mode that actually produces a given metric.
inline Mode mode_for_metric(const std::string& metric) {
  if (metric == "conversion") return Mode::AB;
  if (metric == "tau_pref") return Mode::Interleaving;
  return Mode::Counterfactual;
}

// Builds the stream for one metric on top of a base experiment definition,
// switching the run mode to whichever evaluation produces that metric so
// every metric is measured on the same rankers, users and traffic grid.
inline std::unique_ptr<SimMetricStream> make_metric_stream(
    const ExperimentConfig& base, const std::string& metric) {
  ExperimentConfig cfg = base;
  cfg.mode = mode_for_metric(metric);
  if (cfg.mode != Mode::AB && cfg.experiment_lane.empty()) {
    cfg.experiment_lane = "lane-power";
    cfg.delivery.online_eval_fraction = 1.0;
    cfg.delivery.lanes = {{cfg.experiment_lane, 1.0, cfg.mode}};
  } else if (cfg.mode != Mode::AB) {
    for (auto& lane : cfg.delivery.lanes)
      if (lane.id == cfg.experiment_lane) lane.mode = cfg.mode;
  }
  return std::make_unique<SimMetricStream>(std::move(cfg), metric);
}

}  // namespace rankeval::sim
