#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rolefinder {

// 64-bit FNV-1a over arbitrary bytes. Used for registry/input hashes and seed labels.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Sub-seed for a labeled component, e.g. derive_seed(seed, "smote", fold).
// Independent of call order, so parallel consumers stay reproducible.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                    std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(base ^ fnv1a64(label)) + index);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base, std::string_view label, std::uint64_t index = 0) {
  return Rng(derive_seed(base, label, index));
}

// Uniform double in [0, 1). Uses the top 53 bits so results do not depend on
// the standard library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

}  // namespace rolefinder
