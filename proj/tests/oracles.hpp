// Independent brute-force reference implementations used only by tests.
// These re-derive every estimator with plain loops over event tuples and
// never touch the library's aggregation path, so they can arbitrate it.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace oracle {

struct Params {
  int k = 4;
  int alpha = 2;
  double gamma = 0.9;
  double theta = 0.2;
  double beta1 = 0.5;
  double beta2 = 0.5;
};

// One engaged (booked) item: the user it belongs to, the arm the user was
// shown (w = 1 treatment, 0 control), and the item's 1-based ranks under the
// shown and counterfactual rankers.
struct BookingTuple {
  std::uint64_t user = 0;
  int w = 0;
  int r_shown = 0;
  int r_cf = 0;
};

struct UserSums {
  int w = 0;
  double y_sim = 0, y_diff = 0, win = 0, loss = 0;
};

inline std::map<std::uint64_t, UserSums> per_user(
    const std::vector<BookingTuple>& events,
    const std::vector<std::pair<std::uint64_t, int>>& users,
    const Params& p) {
  std::map<std::uint64_t, UserSums> sums;
  for (const auto& [uid, w] : users) sums[uid] = UserSums{w, 0, 0, 0, 0};
  for (const auto& e : events) {
    auto& s = sums[e.user];
    s.w = e.w;
    const int diff = std::abs(e.r_shown - e.r_cf);
    if (e.r_shown <= p.k && e.r_cf <= p.k && diff <= p.alpha) s.y_sim += 1;
    if (diff > p.alpha) s.y_diff += 1;
    const double g = 1.0 - std::pow(p.gamma, std::max(diff - p.alpha, 0));
    if (e.r_cf - e.r_shown - p.alpha > 0) s.win += g;
    if (e.r_shown - e.r_cf - p.alpha > 0) s.loss += g;
  }
  return sums;
}

struct Estimates {
  double tau_sim = 0, tau_diff = 0, tau_decomp = 0;
  double tau_g = 0, tau_win_loss = 0, tau_oec = 0;
};

inline Estimates estimate(const std::vector<BookingTuple>& events,
                          const std::vector<std::pair<std::uint64_t, int>>& users,
                          const Params& p) {
  const auto sums = per_user(events, users, p);
  double n1 = 0, n0 = 0;
  double sim1 = 0, sim0 = 0, diff1 = 0, diff0 = 0;
  double win1 = 0, win0 = 0, wl1 = 0, wl0 = 0;
  for (const auto& [uid, s] : sums) {
    if (s.w == 1) {
      n1 += 1;
      sim1 += s.y_sim;
      diff1 += s.y_diff;
      if (s.win > 0) win1 += s.win;  // literal indicator form
      wl1 += s.win - s.loss;
    } else {
      n0 += 1;
      sim0 += s.y_sim;
      diff0 += s.y_diff;
      if (s.win > 0) win0 += s.win;
      wl0 += s.win - s.loss;
    }
  }
  const double n = n1 + n0;
  Estimates out;
  out.tau_sim = sim1 / n1 - sim0 / n0;
  out.tau_diff = diff1 / n1 - diff0 / n0;
  out.tau_decomp = out.tau_diff + p.theta * out.tau_sim;
  out.tau_g = (win1 - win0) / n;
  out.tau_win_loss = (wl1 - wl0) / n;
  out.tau_oec = p.beta1 * out.tau_decomp + p.beta2 * out.tau_g;
  return out;
}

}  // namespace oracle
