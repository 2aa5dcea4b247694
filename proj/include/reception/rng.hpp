#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace reception::rng {

// All randomness flows through mt19937_64 (its output sequence is fixed by
// the standard) and the helpers below, never through std::*_distribution,
// whose algorithms differ across standard libraries.
using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t basis = 0xCBF29CE484222325ULL) noexcept {
  std::uint64_t h = basis;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) noexcept {
  return splitmix64(seed ^ splitmix64(salt));
}

// Seed for work keyed by a string (e.g. a message id); independent of the
// order in which keys are visited.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept {
  return mix(seed, fnv1a64(key));
}

// Unbiased integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(Engine& engine, std::uint64_t bound);

// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Engine& engine);

// k distinct indices from [0, n), uniformly, in draw order.
std::vector<std::size_t> sample_without_replacement(Engine& engine, std::size_t n,
                                                    std::size_t k);

template <typename T>
void shuffle(Engine& engine, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[uniform_below(engine, i)]);
  }
}

}  // namespace reception::rng
