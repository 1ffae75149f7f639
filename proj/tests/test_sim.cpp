#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

#include "rankeval/sim/catalog.hpp"
#include "rankeval/sim/config.hpp"
#include "rankeval/sim/meta.hpp"
#include "rankeval/sim/ranker.hpp"
#include "rankeval/sim/runner.hpp"
#include "rankeval/sim/user_model.hpp"
#include "rankeval/stats/gamma_fit.hpp"

using namespace rankeval;
using namespace rankeval::sim;

namespace {

ExperimentConfig small_config(Mode mode, std::uint64_t seed = 11) {
  ExperimentConfig cfg;
  cfg.experiment_id = "unit-exp";
  cfg.mode = mode;
  cfg.master_seed = seed;
  cfg.n_users = 400;
  cfg.catalog = {3, 120};
  cfg.listings_per_search = 15;
  cfg.control = {RankerSpec::Kind::NoisyUtility, "control", 1.0};
  cfg.treatment = {RankerSpec::Kind::NoisyUtility, "treatment", 1.0};
  cfg.user_model.kind = UserModel::Kind::Cascade;
  cfg.user_model.examination_decay = 0.8;
  cfg.user_model.base_click = 0.4;
  cfg.user_model.utility_sensitivity = 1.0;
  cfg.user_model.book_given_click = 0.3;
  cfg.user_model.searches_per_journey = 3;
  if (mode == Mode::AB) {
    cfg.delivery.online_eval_fraction = 0.0;
  } else {
    cfg.delivery.online_eval_fraction = 1.0;
    cfg.experiment_lane = "lane-1";
    cfg.delivery.lanes = {{"lane-1", 1.0, mode}};
  }
  return cfg;
}

}  // namespace

TEST_CASE("catalog generation is deterministic with sane moments") {
  const auto a = gen_catalog(42, 1000);
  const auto b = gen_catalog(42, 1000);
  REQUIRE(a.listings.size() == 1000);
  for (std::size_t i = 0; i < a.listings.size(); ++i) {
    CHECK(a.listings[i].id == b.listings[i].id);
    CHECK(a.listings[i].utility == b.listings[i].utility);
  }
  const auto c = gen_catalog(43, 1000);
  int different = 0;
  for (std::size_t i = 0; i < c.listings.size(); ++i)
    different += c.listings[i].utility != a.listings[i].utility;
  CHECK(different > 990);

  // standard normal: mean ~ 0 +- 3/sqrt(n), variance ~ 1
  double sum = 0, ss = 0;
  for (const auto& l : a.listings) {
    sum += l.utility;
    ss += l.utility * l.utility;
  }
  const double mean = sum / 1000.0;
  const double var = ss / 1000.0 - mean * mean;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(1000.0));
  CHECK(var == Catch::Approx(1.0).margin(0.15));

  CHECK_THROWS_AS(gen_catalog(1, 0), ConfigError);
}

TEST_CASE("zero-noise ranker sorts by utility") {
  const auto catalog = gen_catalog(7, 50);
  RankerSpec spec{RankerSpec::Kind::NoisyUtility, "exact", 0.0};
  const auto list = rank(spec, catalog.listings, 1, 99, RankerLabel::Control,
                         SearchId{1});
  REQUIRE(list.items.size() == 50);
  for (std::size_t i = 1; i < list.items.size(); ++i)
    CHECK(catalog.utility_of(list.items[i - 1]) >=
          catalog.utility_of(list.items[i]));
}

TEST_CASE("position swap") {
  const auto catalog = gen_catalog(7, 10);
  RankerSpec base{RankerSpec::Kind::NoisyUtility, "base", 0.0};
  RankerSpec spec;
  spec.kind = RankerSpec::Kind::PositionSwap;
  spec.label = "swap";
  spec.base = std::make_shared<RankerSpec>(base);
  spec.pos_i = 1;
  spec.pos_j = 2;
  const auto plain = rank(base, catalog.listings, 1, 5, RankerLabel::Control,
                          SearchId{1});
  const auto swapped = rank(spec, catalog.listings, 1, 5, RankerLabel::Control,
                            SearchId{1});
  CHECK(swapped.items[0] == plain.items[1]);
  CHECK(swapped.items[1] == plain.items[0]);
  for (std::size_t i = 2; i < plain.items.size(); ++i)
    CHECK(swapped.items[i] == plain.items[i]);

  spec.pos_j = 99;
  CHECK_THROWS_AS(rank(spec, catalog.listings, 1, 5, RankerLabel::Control,
                       SearchId{1}),
                  ConfigError);
}

TEST_CASE("random-to-top promotes each rank equally often") {
  const auto catalog = gen_catalog(7, 12);
  RankerSpec base{RankerSpec::Kind::NoisyUtility, "base", 0.0};
  RankerSpec spec;
  spec.kind = RankerSpec::Kind::RandomToTop;
  spec.label = "probe";
  spec.base = std::make_shared<RankerSpec>(base);

  const auto plain = rank(base, catalog.listings, 1, 0, RankerLabel::Control,
                          SearchId{1});
  std::map<std::uint64_t, int> promoted;
  const int n = 24000;
  for (int s = 1; s <= n; ++s) {
    const auto list = rank(spec, catalog.listings, 1,
                           static_cast<std::uint64_t>(s), RankerLabel::Control,
                           SearchId{static_cast<std::uint64_t>(s)});
    promoted[list.items[0].value] += 1;
  }
  // every listing reaches the top with frequency 1/12 within 5 sigma
  const double expect = static_cast<double>(n) / 12.0;
  const double sigma = std::sqrt(expect * (1.0 - 1.0 / 12.0));
  for (const auto& l : plain.items) {
    const double got = promoted[l.value];
    CHECK(std::abs(got - expect) < 5 * sigma);
  }
}

TEST_CASE("diversity rerank makes local demotions only") {
  const auto catalog = gen_catalog(19, 40);
  RankerSpec base{RankerSpec::Kind::NoisyUtility, "base", 0.0};
  RankerSpec spec;
  spec.kind = RankerSpec::Kind::DiversityRerank;
  spec.label = "diversity";
  spec.base = std::make_shared<RankerSpec>(base);
  spec.swap_depth = 3;
  spec.penalty = 0.15;

  const auto plain = rank(base, catalog.listings, 1, 4, RankerLabel::Control,
                          SearchId{4});
  const auto reranked = rank(spec, catalog.listings, 1, 4,
                             RankerLabel::Control, SearchId{4});
  REQUIRE(reranked.items.size() == plain.items.size());

  std::set<std::uint64_t> a, b;
  int moved = 0, max_shift = 0;
  for (std::size_t i = 0; i < plain.items.size(); ++i) {
    a.insert(plain.items[i].value);
    b.insert(reranked.items[i].value);
    const int shift =
        std::abs(plain.rank_of(plain.items[i]) -
                 reranked.rank_of(plain.items[i]));
    moved += shift > 0;
    max_shift = std::max(max_shift, shift);
  }
  CHECK(a == b);          // same item set
  CHECK(moved > 0);       // something was demoted
  CHECK(max_shift <= 2 * spec.swap_depth);
}

TEST_CASE("user model basics") {
  const auto catalog = gen_catalog(7, 30);
  RankerSpec base{RankerSpec::Kind::NoisyUtility, "base", 0.0};
  const auto list = rank(base, catalog.listings, 1, 3, RankerLabel::Control,
                         SearchId{3});

  UserModel model;
  model.book_given_click = 0.0;
  model.base_click = 0.5;
  int clicks = 0;
  for (std::uint64_t u = 1; u <= 300; ++u) {
    const auto events = simulate_user(list, model, u, catalog);
    for (const auto& e : events) {
      CHECK(e.kind == EventKind::Click);  // bookings disabled
      ++clicks;
    }
  }
  CHECK(clicks > 0);

  // determinism per seed
  const auto e1 = simulate_user(list, model, 77, catalog);
  const auto e2 = simulate_user(list, model, 77, catalog);
  REQUIRE(e1.size() == e2.size());
  for (std::size_t i = 0; i < e1.size(); ++i)
    CHECK(e1[i].listing == e2[i].listing);
}

TEST_CASE("cascade click frequency decays geometrically") {
  const auto catalog = gen_catalog(7, 30);
  RankerSpec base{RankerSpec::Kind::NoisyUtility, "base", 0.0};

  UserModel model;
  model.kind = UserModel::Kind::Cascade;
  model.examination_decay = 0.7;
  model.base_click = 0.6;
  model.utility_sensitivity = 0.0;  // constant click rate per examined rank
  model.book_given_click = 0.0;

  std::map<int, double> hist;
  for (std::uint64_t u = 1; u <= 60000; ++u) {
    const auto list = rank(base, catalog.listings, 1, u, RankerLabel::Control,
                           SearchId{u});
    for (const auto& e : simulate_user(list, model, u, catalog)) {
      const int r = list.rank_of(e.listing);
      hist[r] += 1.0;
    }
  }
  const double fitted = stats::fit_gamma(hist);
  CHECK(fitted == Catch::Approx(0.7).margin(0.02));
}

TEST_CASE("random-click model clicks uniformly over ranks") {
  const auto catalog = gen_catalog(7, 20);
  RankerSpec base{RankerSpec::Kind::NoisyUtility, "base", 0.0};
  const auto list = rank(base, catalog.listings, 1, 3, RankerLabel::Control,
                         SearchId{3});

  UserModel model;
  model.kind = UserModel::Kind::RandomClick;
  model.base_click = 0.3;
  model.book_given_click = 0.0;
  std::map<int, int> hist;
  int total = 0;
  for (std::uint64_t u = 1; u <= 40000; ++u)
    for (const auto& e : simulate_user(list, model, u, catalog)) {
      hist[list.rank_of(e.listing)] += 1;
      ++total;
    }
  const double expect = static_cast<double>(total) / 20.0;
  for (const auto& [rank, count] : hist)
    CHECK(std::abs(count - expect) < 5 * std::sqrt(expect));
}

TEST_CASE("runner output is deterministic and thread-invariant") {
  auto cfg = small_config(Mode::Interleaving);
  cfg.n_users = 300;
  const auto r1 = run_experiment(cfg);
  const auto r2 = run_experiment(cfg);
  auto cfg4 = cfg;
  cfg4.threads = 4;
  const auto r4 = run_experiment(cfg4);

  REQUIRE(r1.exposures.size() == r2.exposures.size());
  REQUIRE(r1.exposures.size() == r4.exposures.size());
  REQUIRE(r1.events.size() == r4.events.size());
  for (std::size_t i = 0; i < r1.exposures.size(); ++i) {
    CHECK(to_json(r1.exposures[i]) == to_json(r2.exposures[i]));
    CHECK(to_json(r1.exposures[i]) == to_json(r4.exposures[i]));
  }
  for (std::size_t i = 0; i < r1.events.size(); ++i) {
    CHECK(to_json(r1.events[i]) == to_json(r4.events[i]));
  }
  CHECK(analysis::to_json(r1.report) == analysis::to_json(r4.report));

  // logs validate cleanly
  CHECK(r1.report.validation.ok());
}

TEST_CASE("earlier users are unaffected by the population size") {
  auto small = small_config(Mode::Counterfactual);
  small.n_users = 50;
  auto large = small;
  large.n_users = 120;
  const auto rs = run_experiment(small);
  const auto rl = run_experiment(large);
  // the first 50 users' records are identical
  std::map<std::uint64_t, nlohmann::json> small_by_search, large_by_search;
  for (const auto& x : rs.exposures)
    small_by_search[x.search.value] = to_json(x);
  for (const auto& x : rl.exposures)
    if (x.user.value <= 50) large_by_search[x.search.value] = to_json(x);
  CHECK(small_by_search == large_by_search);
}

TEST_CASE("counterfactual users see one consistent ranker") {
  auto cfg = small_config(Mode::Counterfactual);
  cfg.n_users = 200;
  const auto r = run_experiment(cfg);
  std::map<std::uint64_t, RankerLabel> arm;
  for (const auto& x : r.exposures) {
    if (x.mode != Mode::Counterfactual) continue;
    REQUIRE(x.shown_ranker.has_value());
    const auto [it, fresh] = arm.emplace(x.user.value, *x.shown_ranker);
    if (!fresh) CHECK(it->second == *x.shown_ranker);
    // the shown list is exactly one ranker's full output
    const auto& shown = x.list_for(*x.shown_ranker);
    CHECK(shown.items.size() == cfg.listings_per_search);
  }
  CHECK(arm.size() > 100);
}

TEST_CASE("interleaving coins are balanced within binomial noise") {
  auto cfg = small_config(Mode::Interleaving);
  cfg.n_users = 1500;
  cfg.user_model.searches_per_journey = 2;
  const auto r = run_experiment(cfg);
  int n = 0, c_first = 0;
  for (const auto& x : r.exposures) {
    if (x.mode != Mode::Interleaving) continue;
    ++n;
    c_first += x.interleaved->is_c_first;
  }
  REQUIRE(n > 2000);
  const double share = static_cast<double>(c_first) / n;
  CHECK(std::abs(share - 0.5) < 4.0 * std::sqrt(0.25 / n));
}

TEST_CASE("delivery routing controls participation") {
  auto cfg = small_config(Mode::Interleaving);
  cfg.n_users = 600;
  cfg.delivery.online_eval_fraction = 0.5;
  cfg.delivery.lanes = {{"lane-1", 0.5, Mode::Interleaving},
                        {"lane-2", 0.5, Mode::Counterfactual}};
  const auto r = run_experiment(cfg);
  int il = 0, background = 0;
  for (const auto& x : r.exposures) {
    if (x.mode == Mode::Interleaving) {
      CHECK(x.lane == "lane-1");
      ++il;
    } else {
      CHECK(x.shown_ranker == RankerLabel::Control);
      ++background;
    }
  }
  CHECK(il > 0);
  CHECK(background > 0);
  // roughly a quarter of users participate
  CHECK(static_cast<double>(r.report.n_users) / cfg.n_users ==
        Catch::Approx(0.25).margin(0.08));
}

TEST_CASE("meta corpus needs at least three entries") {
  auto base = small_config(Mode::AB);
  std::vector<double> grid = {0.8, 1.2};
  CHECK_THROWS_AS(run_meta(base, grid, {}), ConfigError);
}
