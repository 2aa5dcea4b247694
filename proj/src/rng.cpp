#include "reception/rng.hpp"

#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "reception/error.hpp"

namespace reception::rng {

std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  if (bound == 0) throw ValidationError("uniform_below: bound must be positive");
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine();
  } while (x > limit);
  return x % bound;
}

double uniform_unit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> sample_without_replacement(Engine& engine, std::size_t n,
                                                    std::size_t k) {
  if (k > n) throw ValidationError("cannot sample " + std::to_string(k) + " of " + std::to_string(n));
  // Partial Fisher-Yates over a sparse view of [0, n).
  std::unordered_map<std::size_t, std::size_t> swapped;
  auto at = [&](std::size_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(engine, n - i));
    const std::size_t vi = at(i);
    const std::size_t vj = at(j);
    out.push_back(vj);
    swapped[j] = vi;
    swapped[i] = vj;
  }
  return out;
}

}  // namespace reception::rng
