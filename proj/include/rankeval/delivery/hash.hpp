#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace rankeval::delivery {

// XXH64: stable, platform-independent 64-bit hash. All multi-byte reads are
// little-endian regardless of host byte order, so assignments replay
// identically everywhere. Pinned test vectors live in tests/test_delivery.cpp
// and in the README.
namespace detail {

inline constexpr std::uint64_t kPrime1 = 0x9E3779B185EBCA87ULL;
inline constexpr std::uint64_t kPrime2 = 0xC2B2AE3D27D4EB4FULL;
inline constexpr std::uint64_t kPrime3 = 0x165667B19E3779F9ULL;
inline constexpr std::uint64_t kPrime4 = 0x85EBCA77C2B2AE63ULL;
inline constexpr std::uint64_t kPrime5 = 0x27D4EB2F165667C5ULL;

inline std::uint64_t rotl64(std::uint64_t x, int r) {
  return (x << r) | (x >> (64 - r));
}

inline std::uint64_t read64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::uint32_t read32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t round64(std::uint64_t acc, std::uint64_t input) {
  acc += input * kPrime2;
  acc = rotl64(acc, 31);
  acc *= kPrime1;
  return acc;
}

inline std::uint64_t merge_round(std::uint64_t h, std::uint64_t acc) {
  h ^= round64(0, acc);
  return h * kPrime1 + kPrime4;
}

}  // namespace detail

inline std::uint64_t xxh64_bytes(const void* data, std::size_t len,
                                 std::uint64_t seed = 0) {
  using namespace detail;
  const unsigned char* p = static_cast<const unsigned char*>(data);
  const unsigned char* const end = p + len;
  std::uint64_t h;

  if (len >= 32) {
    std::uint64_t v1 = seed + kPrime1 + kPrime2;
    std::uint64_t v2 = seed + kPrime2;
    std::uint64_t v3 = seed;
    std::uint64_t v4 = seed - kPrime1;
    const unsigned char* const limit = end - 32;
    do {
      v1 = round64(v1, read64le(p)); p += 8;
      v2 = round64(v2, read64le(p)); p += 8;
      v3 = round64(v3, read64le(p)); p += 8;
      v4 = round64(v4, read64le(p)); p += 8;
    } while (p <= limit);
    h = rotl64(v1, 1) + rotl64(v2, 7) + rotl64(v3, 12) + rotl64(v4, 18);
    h = merge_round(h, v1);
    h = merge_round(h, v2);
    h = merge_round(h, v3);
    h = merge_round(h, v4);
  } else {
    h = seed + kPrime5;
  }

  h += static_cast<std::uint64_t>(len);

  while (p + 8 <= end) {
    h ^= round64(0, read64le(p));
    h = rotl64(h, 27) * kPrime1 + kPrime4;
    p += 8;
  }
  if (p + 4 <= end) {
    h ^= static_cast<std::uint64_t>(read32le(p)) * kPrime1;
    h = rotl64(h, 23) * kPrime2 + kPrime3;
    p += 4;
  }
  while (p < end) {
    h ^= static_cast<std::uint64_t>(*p) * kPrime5;
    h = rotl64(h, 11) * kPrime1;
    ++p;
  }

  h ^= h >> 33;
  h *= kPrime2;
  h ^= h >> 29;
  h *= kPrime3;
  h ^= h >> 32;
  return h;
}

inline std::uint64_t xxh64(std::string_view s, std::uint64_t seed = 0) {
  return xxh64_bytes(s.data(), s.size(), seed);
}

// Maps a 64-bit hash to [0, 1) using the top 53 bits as a binary fraction,
// so the value is exactly representable and identical on every platform.
inline double unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Hash of the UTF-8 concatenation "salt|id".
inline std::uint64_t salted_hash(std::string_view salt, std::string_view id) {
  std::string buf;
  buf.reserve(salt.size() + 1 + id.size());
  buf.append(salt);
  buf.push_back('|');
  buf.append(id);
  return xxh64(buf);
}

}  // namespace rankeval::delivery
