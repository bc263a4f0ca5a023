#pragma once

// Input derivation for the ABI golden vectors, mirrored by
// scripts/make_abi_golden.py. Any change here must be reflected there and
// the golden files regenerated.

#include <cstdint>
#include <string>
#include <vector>

#include "osmoracle/abi.hpp"

namespace osmo::test {

struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

inline const std::vector<std::string>& golden_alphabet() {
  static const std::vector<std::string> kAlphabet = [] {
    std::vector<std::string> a;
    for (char c = 'a'; c <= 'z'; ++c) a.emplace_back(1, c);
    for (char c = 'A'; c <= 'Z'; ++c) a.emplace_back(1, c);
    for (char c = '0'; c <= '9'; ++c) a.emplace_back(1, c);
    for (const char* s : {" ", "_", "-", ".", ",", ":", "#", "/"}) {
      a.emplace_back(s);
    }
    a.emplace_back("\xC3\xA9");      // U+00E9
    a.emplace_back("\xE2\x82\xAC");  // U+20AC
    a.emplace_back("\xE4\xB8\xAD");  // U+4E2D
    a.emplace_back("\xD0\x94");      // U+0414
    return a;
  }();
  return kAlphabet;
}

inline std::int64_t golden_lat(SplitMix64& rng) {
  return static_cast<std::int64_t>(rng.next() % (2 * 9000000000ULL + 1)) -
         9000000000LL;
}

inline std::int64_t golden_lon(SplitMix64& rng) {
  return static_cast<std::int64_t>(rng.next() % (2 * 18000000000ULL + 1)) -
         18000000000LL;
}

inline std::uint64_t golden_id(SplitMix64& rng) {
  return rng.next() % 0x7FFFFFFFFFFFFFFFULL + 1;
}

inline std::string golden_string(SplitMix64& rng, bool nonempty = false) {
  const std::uint64_t length =
      nonempty ? rng.next() % 40 + 1 : rng.next() % 41;
  std::string out;
  for (std::uint64_t i = 0; i < length; ++i) {
    out += golden_alphabet()[rng.next() % golden_alphabet().size()];
  }
  return out;
}

inline constexpr std::uint64_t kGoldenVectors = 100;
inline constexpr std::int64_t kI64Max = 0x7FFFFFFFFFFFFFFFLL;
inline constexpr std::int64_t kI64Min = -kI64Max - 1;

// Seeds: int64=101, int64_array=202, string_array=303, coord_pairs=404,
// geocode=505, reverse=606.

inline std::int64_t golden_int64_input(std::size_t i, SplitMix64& rng) {
  const std::int64_t specials[] = {0, 1, -1, kI64Max, kI64Min};
  return i < 5 ? specials[i] : static_cast<std::int64_t>(rng.next());
}

inline std::vector<std::int64_t> golden_int64_array_input(std::size_t i,
                                                          SplitMix64& rng) {
  const std::vector<std::vector<std::int64_t>> specials = {
      {}, {0}, {1, -1}, {kI64Max, kI64Min}};
  if (i < specials.size()) return specials[i];
  std::vector<std::int64_t> vs(rng.next() % 9);
  for (auto& v : vs) v = static_cast<std::int64_t>(rng.next());
  return vs;
}

inline std::vector<std::string> golden_string_array_input(std::size_t i,
                                                          SplitMix64& rng) {
  const std::vector<std::vector<std::string>> specials = {
      {}, {""}, {"Paris", "324"}};
  if (i < specials.size()) return specials[i];
  std::vector<std::string> ss(rng.next() % 6);
  for (auto& s : ss) s = golden_string(rng);
  return ss;
}

inline std::vector<ScaledCoord> golden_coord_pairs_input(std::size_t i,
                                                         SplitMix64& rng) {
  const std::vector<std::vector<ScaledCoord>> specials = {
      {}, {{0, 0}}, {{4077190000, -7397460000}}};
  if (i < specials.size()) return specials[i];
  std::vector<ScaledCoord> cs(rng.next() % 11);
  for (auto& c : cs) {
    const std::int64_t lat = golden_lat(rng);
    const std::int64_t lon = golden_lon(rng);
    c = ScaledCoord{lat, lon};
  }
  return cs;
}

inline GeocodeResult golden_geocode_input(std::size_t i, SplitMix64& rng) {
  if (i == 0) return GeocodeResult{ObjectType::Node, 1, {0, 0}};
  if (i == 1) {
    return GeocodeResult{ObjectType::Way, 1, {9000000000LL, -18000000000LL}};
  }
  GeocodeResult r;
  r.type = (rng.next() & 1) ? ObjectType::Way : ObjectType::Node;
  r.id = golden_id(rng);
  r.coord.lat = golden_lat(rng);
  r.coord.lon = golden_lon(rng);
  return r;
}

inline ReverseGeocodeResult golden_reverse_input(std::size_t i,
                                                 SplitMix64& rng) {
  if (i == 0) return ReverseGeocodeResult{ObjectType::Node, 1, "X"};
  if (i == 1) return ReverseGeocodeResult{ObjectType::Way, 7, "way 7"};
  ReverseGeocodeResult r;
  r.type = (rng.next() & 1) ? ObjectType::Way : ObjectType::Node;
  r.id = golden_id(rng);
  r.description = golden_string(rng, /*nonempty=*/true);
  return r;
}

}  // namespace osmo::test
