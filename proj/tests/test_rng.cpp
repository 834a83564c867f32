#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include <emoshot/rng.hpp>

using namespace emoshot;

TEST(Rng, GeneratorMatchesStandardReferenceValue) {
  std::mt19937_64 gen;
  for (int i = 0; i < 9999; ++i) gen();
  EXPECT_EQ(gen(), 9981545732273789042ULL);
}

TEST(Rng, UniformBelowStaysInRange) {
  std::mt19937_64 gen(3);
  for (std::uint64_t bound : {1ULL, 2ULL, 7ULL, 1000ULL, (1ULL << 63) + 5})
    for (int i = 0; i < 200; ++i) EXPECT_LT(uniform_below(gen, bound), bound);
}

TEST(Rng, SampleIsSortedDistinctAndSized) {
  const auto s = sample_without_replacement(50, 20, 9);
  ASSERT_EQ(s.size(), 20u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
  EXPECT_LT(s.back(), 50u);
}

TEST(Rng, FullSampleIsEveryIndex) {
  for (std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
    const auto s = sample_without_replacement(13, 13, seed);
    for (std::size_t i = 0; i < 13; ++i) EXPECT_EQ(s[i], i);
  }
}

TEST(Rng, SameSeedSameSample) {
  EXPECT_EQ(sample_without_replacement(1000, 30, 77), sample_without_replacement(1000, 30, 77));
  EXPECT_NE(sample_without_replacement(1000, 30, 77), sample_without_replacement(1000, 30, 78));
}

TEST(Rng, FrozenSample) {
  EXPECT_EQ(sample_without_replacement(10, 3, 42), (std::vector<std::size_t>{0, 4, 6}));
}

TEST(Rng, RoughlyUniformInclusion) {
  std::map<std::size_t, int> hits;
  for (std::uint64_t seed = 0; seed < 4000; ++seed)
    for (auto i : sample_without_replacement(8, 2, seed)) ++hits[i];
  for (const auto& [i, n] : hits) EXPECT_NEAR(n, 1000, 120) << i;
}
