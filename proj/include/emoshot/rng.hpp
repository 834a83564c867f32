#ifndef EMOSHOT_RNG_HPP
#define EMOSHOT_RNG_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace emoshot {

// All sampling in the library goes through std::mt19937_64, whose output sequence is fixed
// by the C++ standard. Bounded draws use plain rejection sampling instead of
// std::uniform_int_distribution, which is implementation-defined, so a (seed, n, k) triple
// selects the same elements on every platform.

/// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  constexpr auto max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound);
  std::uint64_t x = gen();
  while (x >= limit) x = gen();
  return x % bound;
}

/// k distinct indices from [0, population), chosen uniformly, returned ascending.
/// Partial Fisher-Yates over the identity permutation.
inline std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t k,
                                                           std::uint64_t seed) {
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_below(gen, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace emoshot

#endif  // EMOSHOT_RNG_HPP
