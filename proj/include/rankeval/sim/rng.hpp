#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace rankeval::sim {

// Counter-based deterministic generator: every stream is keyed by
// (master_seed, stream tag, index words), and draw i is a pure function of
// (key, i). Streams never share state, so per-user simulation is
// reproducible under any parallel schedule, and draws for user k never
// depend on how many users exist.
namespace rngdetail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace rngdetail

// Stream tags; keep values stable, they are part of the replay contract.
enum class Stream : std::uint64_t {
  CatalogUtility = 1,
  Candidates = 2,
  RankNoise = 3,
  RandomPromote = 4,
  Behavior = 5,
  PowerReplication = 6,
};

class Rng {
 public:
  static Rng keyed(std::uint64_t master_seed, Stream tag, std::uint64_t a = 0,
                   std::uint64_t b = 0, std::uint64_t c = 0) {
    using rngdetail::kGolden;
    using rngdetail::mix64;
    std::uint64_t key = mix64(master_seed + kGolden);
    key = mix64(key ^ (static_cast<std::uint64_t>(tag) * kGolden));
    key = mix64(key ^ (a + 0x8000000000000001ULL));
    key = mix64(key ^ (b + 0x100000001B3ULL));
    key = mix64(key ^ (c + 0xCBF29CE484222325ULL));
    return Rng(key);
  }

  std::uint64_t next_u64() {
    counter_ += rngdetail::kGolden;
    return rngdetail::mix64(key_ + counter_);
  }

  // Uniform in [0, 1) from the top 53 bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bool(double p_true) { return next_unit() < p_true; }

  // Uniform integer in [0, n).
  std::uint64_t next_index(std::uint64_t n) {
    return n > 0 ? next_u64() % n : 0;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_unit();
    const double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rankeval::sim
