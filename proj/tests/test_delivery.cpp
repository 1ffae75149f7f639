#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "rankeval/delivery/assignment.hpp"
#include "rankeval/delivery/hash.hpp"
#include "rankeval/stats/tests.hpp"

using namespace rankeval;
using namespace rankeval::delivery;

TEST_CASE("xxh64 matches the reference test vectors") {
  // vectors cross-checked against the reference implementation
  CHECK(xxh64("", 0) == 0xef46db3751d8e999ULL);
  CHECK(xxh64("a", 0) == 0xd24ec4f1a98c6e5bULL);
  CHECK(xxh64("abc", 0) == 0x44bc2cf5ad770999ULL);
  CHECK(xxh64("salt|12345", 0) == 0x9d3df29dd36bd4c0ULL);
  CHECK(xxh64("layer1|default|42", 0) == 0xe98e10124bd07bf7ULL);
  CHECK(xxh64("the quick brown fox jumps over the lazy dog", 0) ==
        0xed714233c5a9a792ULL);
  CHECK(xxh64("the quick brown fox jumps over the lazy dog", 12345) ==
        0xe2acda4c96c14857ULL);
  CHECK(xxh64("0123456789abcdef0123456789abcdef!", 0) ==
        0x8afff4daac4e677eULL);
  CHECK(xxh64("coin|exp-001|987654321", 0) == 0x0a229c406075d53dULL);
  CHECK(xxh64("assign|exp-001|42", 0) == 0x31e716e830ad8a4cULL);
  // seeded variants
  CHECK(xxh64("", 0x9E3779B97F4A7C15ULL) == 0xc4349fc93c010000ULL);
  CHECK(xxh64("abc", 0x9E3779B97F4A7C15ULL) == 0x2ed0f59d6b43ac8bULL);
}

TEST_CASE("unit_interval uses the top 53 bits") {
  CHECK(unit_interval(0) == 0.0);
  CHECK(unit_interval(~0ULL) < 1.0);
  CHECK(unit_interval(~0ULL) == Catch::Approx(1.0).epsilon(1e-15));
  CHECK(unit_interval(1ULL << 63) == 0.5);
}

static DeliveryConfig two_lane_config(double fraction) {
  DeliveryConfig cfg;
  cfg.online_eval_fraction = fraction;
  cfg.lanes = {{"lane-a", 0.5, Mode::Interleaving},
               {"lane-b", 0.5, Mode::Counterfactual}};
  return cfg;
}

TEST_CASE("layer1 boundary fractions") {
  auto all_ab = two_lane_config(0.0);
  auto all_eval = two_lane_config(1.0);
  for (std::uint64_t u = 1; u <= 200; ++u) {
    CHECK(layer1_assign(UserId{u}, all_ab) == Layer1::AB);
    CHECK(layer1_assign(UserId{u}, all_eval) == Layer1::OnlineEval);
  }
}

TEST_CASE("layer1 frequency matches the configured fraction") {
  auto cfg = two_lane_config(0.1);
  const int n = 1000000;
  int eval = 0;
  for (int u = 1; u <= n; ++u)
    if (layer1_assign(UserId{static_cast<std::uint64_t>(u)}, cfg) ==
        Layer1::OnlineEval)
      ++eval;
  const double share = static_cast<double>(eval) / n;
  CHECK(share == Catch::Approx(0.1).margin(0.001));
}

TEST_CASE("layer2 splits lanes by weight and reshuffles with the salt") {
  auto cfg = two_lane_config(1.0);
  const int n = 1000000;
  int in_a = 0;
  for (int u = 1; u <= n; ++u)
    if (layer2_assign(UserId{static_cast<std::uint64_t>(u)}, cfg).id ==
        "lane-a")
      ++in_a;
  CHECK(static_cast<double>(in_a) / n == Catch::Approx(0.5).margin(0.002));

  // changing the salt moves individual users but keeps the weights
  auto cfg2 = cfg;
  cfg2.layer2_salt = "another-salt";
  int in_a2 = 0, moved = 0;
  const int m = 100000;
  for (int u = 1; u <= m; ++u) {
    const UserId uid{static_cast<std::uint64_t>(u)};
    const auto& lane1 = layer2_assign(uid, cfg);
    const auto& lane2 = layer2_assign(uid, cfg2);
    if (lane2.id == "lane-a") ++in_a2;
    if (lane1.id != lane2.id) ++moved;
  }
  CHECK(static_cast<double>(in_a2) / m == Catch::Approx(0.5).margin(0.006));
  CHECK(moved > m / 4);  // roughly half the users land elsewhere
}

TEST_CASE("layer1 and layer2 are independent") {
  auto cfg = two_lane_config(0.5);
  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  for (int u = 1; u <= 100000; ++u) {
    const UserId uid{static_cast<std::uint64_t>(u)};
    const bool eval = layer1_assign(uid, cfg) == Layer1::OnlineEval;
    const bool lane_a = layer2_assign(uid, cfg).id == "lane-a";
    if (eval && lane_a) ++n11;
    else if (eval) ++n10;
    else if (lane_a) ++n01;
    else ++n00;
  }
  CHECK(stats::chi_square_independence_2x2(n00, n01, n10, n11) > 0.01);
}

TEST_CASE("empty lane list is an error") {
  DeliveryConfig cfg;
  cfg.online_eval_fraction = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.lanes.clear();
  CHECK_THROWS_AS(layer2_assign(UserId{1}, cfg), ConfigError);
}

TEST_CASE("lane weights must be positive and sum to one") {
  DeliveryConfig cfg;
  cfg.online_eval_fraction = 1.0;
  cfg.lanes = {{"a", 0.7, Mode::Interleaving}, {"b", 0.2, Mode::AB}};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.lanes = {{"a", 0.8, Mode::Interleaving}, {"b", 0.2, Mode::AB}};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("search coin is deterministic, balanced and experiment-specific") {
  CHECK(coin_flip_search(SearchId{7}, "exp-1") ==
        coin_flip_search(SearchId{7}, "exp-1"));

  const int n = 100000;
  int heads = 0;
  int both = 0, first = 0, second = 0;
  for (int s = 1; s <= n; ++s) {
    const SearchId sid{static_cast<std::uint64_t>(s)};
    const bool a = coin_flip_search(sid, "exp-1");
    const bool b = coin_flip_search(sid, "exp-2");
    heads += a;
    both += a && b;
    first += a;
    second += b;
  }
  CHECK(std::abs(static_cast<double>(heads) / n - 0.5) <= 0.005);
  // sample correlation of the two coin sequences is ~0
  const double pa = static_cast<double>(first) / n;
  const double pb = static_cast<double>(second) / n;
  const double cov = static_cast<double>(both) / n - pa * pb;
  const double corr = cov / std::sqrt(pa * (1 - pa) * pb * (1 - pb));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("user coin is stable and independent across experiments") {
  for (std::uint64_t u : {1ULL, 99ULL, 123456789ULL})
    CHECK(coin_flip_user(UserId{u}, "exp-9") ==
          coin_flip_user(UserId{u}, "exp-9"));

  const int n = 100000;
  int treat = 0;
  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  for (int u = 1; u <= n; ++u) {
    const UserId uid{static_cast<std::uint64_t>(u)};
    const bool t1 = coin_flip_user(uid, "exp-1") == RankerLabel::Treatment;
    const bool t2 = coin_flip_user(uid, "exp-2") == RankerLabel::Treatment;
    treat += t1;
    if (t1 && t2) ++n11;
    else if (t1) ++n10;
    else if (t2) ++n01;
    else ++n00;
  }
  CHECK(std::abs(static_cast<double>(treat) / n - 0.5) <= 0.005);
  CHECK(stats::chi_square_independence_2x2(n00, n01, n10, n11) > 0.01);
}
