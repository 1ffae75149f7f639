#pragma once

#include <span>
#include <string>
#include <vector>

#include "rankeval/core/records.hpp"
#include "rankeval/counterfactual/position.hpp"
#include "rankeval/stats/basic.hpp"
#include "rankeval/stats/tests.hpp"

namespace rankeval::cf {

// Per-user sums over the user's attributed booking events. Every user in
// the experiment gets an aggregate, with zeros when they booked nothing.
struct UserCfAggregate {
  UserId user;
  RankerLabel shown_ranker = RankerLabel::Control;  // w
  double y_sim = 0.0;
  double y_diff = 0.0;
  double sum_win = 0.0;
  double sum_loss = 0.0;

  void add_event(const PositionPair& p, const CfHyperparams& h) {
    switch (decompose(p, h)) {
      case Bucket::Sim: y_sim += 1.0; break;
      case Bucket::Diff: y_diff += 1.0; break;
      case Bucket::Neither: break;
    }
    const auto [win, loss] = win_loss(p, h);
    sum_win += win;
    sum_loss += loss;
  }
};

namespace detail {

// Group summaries of one user-level outcome, treatment-shown vs control-shown.
template <typename Outcome>
std::pair<stats::Accumulator, stats::Accumulator> group_accumulate(
    std::span<const UserCfAggregate> aggregates, Outcome&& outcome) {
  stats::Accumulator treat, control;
  for (const auto& a : aggregates) {
    if (a.shown_ranker == RankerLabel::Treatment)
      treat.add(outcome(a));
    else
      control.add(outcome(a));
  }
  return {treat, control};
}

template <typename Outcome>
EstimateReport mean_difference_report(
    std::span<const UserCfAggregate> aggregates, Outcome&& outcome,
    const std::string& name, const std::string& experiment_id) {
  auto [treat, control] = group_accumulate(aggregates, outcome);
  if (treat.n == 0 || control.n == 0)
    throw DegenerateStatistics(name + ": a shown-ranker group has zero users");
  const auto tt = stats::welch_or_untestable(treat.summary(), control.summary());
  EstimateReport r;
  r.metric_name = name;
  r.experiment_id = experiment_id;
  r.tau_hat = tt.delta;
  r.baseline_mean = control.mean();
  r.percent_delta = stats::percent_delta_or_nan(r.tau_hat, r.baseline_mean);
  r.p_value = tt.p_value;
  r.n_units = treat.n + control.n;
  r.variance = tt.se * tt.se;
  return r;
}

// Difference of group sums scaled by the total user count, following the
// estimated-reward estimators. The p-value still comes from the two-sample
// t-test on the user-level outcome.
template <typename Outcome>
EstimateReport sum_difference_report(
    std::span<const UserCfAggregate> aggregates, Outcome&& outcome,
    const std::string& name, const std::string& experiment_id) {
  auto [treat, control] = group_accumulate(aggregates, outcome);
  if (treat.n + control.n == 0)
    throw DegenerateStatistics(name + ": zero users");
  if (treat.n == 0 || control.n == 0)
    throw DegenerateStatistics(name + ": a shown-ranker group has zero users");
  const double n_total = static_cast<double>(treat.n + control.n);
  const auto tt = stats::welch_or_untestable(treat.summary(), control.summary());
  EstimateReport r;
  r.metric_name = name;
  r.experiment_id = experiment_id;
  r.tau_hat = (treat.sum - control.sum) / n_total;
  r.baseline_mean = control.mean();
  r.percent_delta = stats::percent_delta_or_nan(r.tau_hat, r.baseline_mean);
  r.p_value = tt.p_value;
  r.n_units = treat.n + control.n;
  // variance of (S_t - S_c)/N with independent user outcomes
  r.variance = (static_cast<double>(treat.n) * treat.variance() +
                static_cast<double>(control.n) * control.variance()) /
               (n_total * n_total);
  return r;
}

}  // namespace detail

inline EstimateReport tau_sim(std::span<const UserCfAggregate> aggregates,
                              const std::string& experiment_id = "") {
  return detail::mean_difference_report(
      aggregates, [](const UserCfAggregate& a) { return a.y_sim; }, "tau_sim",
      experiment_id);
}

inline EstimateReport tau_diff(std::span<const UserCfAggregate> aggregates,
                               const std::string& experiment_id = "") {
  return detail::mean_difference_report(
      aggregates, [](const UserCfAggregate& a) { return a.y_diff; },
      "tau_diff", experiment_id);
}

// Direct decomposition: tau_diff + theta * tau_sim, tested on the user-level
// composite outcome y_diff + theta * y_sim.
inline EstimateReport tau_decomp(std::span<const UserCfAggregate> aggregates,
                                 const CfHyperparams& h,
                                 const std::string& experiment_id = "") {
  auto r = detail::mean_difference_report(
      aggregates,
      [&](const UserCfAggregate& a) { return a.y_diff + h.theta * a.y_sim; },
      "tau_decomp", experiment_id);
  return r;
}

// Difference of overall wins, normalized by the total user count.
inline EstimateReport tau_g(std::span<const UserCfAggregate> aggregates,
                            const CfHyperparams& h,
                            const std::string& experiment_id = "") {
  (void)h;
  return detail::sum_difference_report(
      aggregates, [](const UserCfAggregate& a) { return a.sum_win; }, "tau_g",
      experiment_id);
}

inline EstimateReport tau_win_loss(std::span<const UserCfAggregate> aggregates,
                                   const CfHyperparams& h,
                                   const std::string& experiment_id = "") {
  (void)h;
  return detail::sum_difference_report(
      aggregates,
      [](const UserCfAggregate& a) { return a.sum_win - a.sum_loss; },
      "tau_win_loss", experiment_id);
}

// OEC: beta1 * tau_decomp + beta2 * tau_g, with significance taken from the
// user-level composite beta1*(y_diff + theta*y_sim) + beta2*sum_win.
inline EstimateReport tau_oec(const EstimateReport& decomp,
                              const EstimateReport& g,
                              std::span<const UserCfAggregate> aggregates,
                              const CfHyperparams& h) {
  if (decomp.experiment_id != g.experiment_id)
    throw ConfigError("tau_oec: component reports from different experiments");
  auto [treat, control] = detail::group_accumulate(
      aggregates, [&](const UserCfAggregate& a) {
        return h.beta1 * (a.y_diff + h.theta * a.y_sim) + h.beta2 * a.sum_win;
      });
  if (treat.n == 0 || control.n == 0)
    throw DegenerateStatistics("tau_oec: a shown-ranker group has zero users");
  const auto tt = stats::welch_or_untestable(treat.summary(), control.summary());
  EstimateReport r;
  r.metric_name = "tau_oec";
  r.experiment_id = decomp.experiment_id;
  r.tau_hat = h.beta1 * decomp.tau_hat + h.beta2 * g.tau_hat;
  r.baseline_mean = control.mean();
  r.percent_delta = stats::percent_delta_or_nan(r.tau_hat, r.baseline_mean);
  r.p_value = tt.p_value;
  r.n_units = treat.n + control.n;
  r.variance = tt.se * tt.se;
  return r;
}

}  // namespace rankeval::cf
