#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "tune/rng.hpp"

using tune::RandomStream;

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, DistinctSeedsDiverge) {
  RandomStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_LT(equal, 3);
}

TEST(RandomStream, SubstreamsAreReproducibleAndIndependentOfConsumption) {
  RandomStream parent(7);
  RandomStream before = parent.substream("child", 3);
  for (int i = 0; i < 10; ++i) parent.next_u64();
  RandomStream after = parent.substream("child", 3);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(before.next_u64(), after.next_u64());
}

TEST(RandomStream, SubstreamLabelsAndIndicesSeparate) {
  RandomStream parent(7);
  EXPECT_NE(parent.substream("a", 0).next_u64(), parent.substream("b", 0).next_u64());
  EXPECT_NE(parent.substream("a", 0).next_u64(), parent.substream("a", 1).next_u64());
}

TEST(RandomStream, UniformIntCoversInclusiveRange) {
  RandomStream rng(11);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    std::int64_t v = rng.uniform_int(4, 10);
    ASSERT_GE(v, 4);
    ASSERT_LE(v, 10);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RandomStream, UniformRealInHalfOpenInterval) {
  RandomStream rng(13);
  for (int i = 0; i < 2000; ++i) {
    double v = rng.uniform_real(-2.5, 3.5);
    ASSERT_GE(v, -2.5);
    ASSERT_LT(v, 3.5);
  }
}

TEST(RandomStream, UniformIntIsRoughlyUniform) {
  RandomStream rng(17);
  std::vector<int> hist(8, 0);
  const int n = 80000;
  for (int i = 0; i < n; ++i) ++hist[static_cast<std::size_t>(rng.uniform_int(0, 7))];
  for (int count : hist) {
    EXPECT_GT(count, n / 8 - 500);
    EXPECT_LT(count, n / 8 + 500);
  }
}

TEST(SampleWithoutReplacement, DistinctAndInRange) {
  RandomStream rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto subset = tune::sample_without_replacement(10, 4, rng);
    ASSERT_EQ(subset.size(), 4u);
    std::set<int> unique(subset.begin(), subset.end());
    EXPECT_EQ(unique.size(), 4u);
    for (int v : subset) {
      EXPECT_GE(v, 0);
      EXPECT_LT(v, 10);
    }
  }
}

TEST(SampleWithoutReplacement, KLargerThanNClamps) {
  RandomStream rng(29);
  auto subset = tune::sample_without_replacement(3, 8, rng);
  EXPECT_EQ(subset.size(), 3u);
}
