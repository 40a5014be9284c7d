#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hris::rng {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives a stream key from a parent key and a list of counters, so that
/// (trial, user, link) triples each get an independent stream.
constexpr std::uint64_t derive(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = mix64(parent);
  for (std::uint64_t c : path) key = mix64(key ^ mix64(c + 0x632be59bd9b4e019ULL));
  return key;
}

// Link identifiers used when deriving channel streams.
enum class Link : std::uint64_t {
  ap_user = 1,
  ris_user = 2,
  ris_ap = 3,
  placement = 4,
};

inline std::mt19937_64 stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive(seed, path));
}

}  // namespace hris::rng
