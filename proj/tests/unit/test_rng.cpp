#include <gtest/gtest.h>

#include <atomic>
#include <set>
#include <stdexcept>

#include "specsense/parallel.hpp"
#include "specsense/rng.hpp"

using namespace specsense;

TEST(DeriveSeed, DependsOnEveryInput) {
  const auto base = derive_seed(1, 2, StreamRole::NoiseFrame);
  EXPECT_EQ(base, derive_seed(1, 2, StreamRole::NoiseFrame));
  EXPECT_NE(base, derive_seed(2, 2, StreamRole::NoiseFrame));
  EXPECT_NE(base, derive_seed(1, 3, StreamRole::NoiseFrame));
  EXPECT_NE(base, derive_seed(1, 2, StreamRole::Channel));
}

TEST(DeriveSeed, NoCollisionsOverSmallGrid) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 8; ++m)
    for (std::uint64_t i = 0; i < 200; ++i)
      for (std::uint64_t r = 1; r <= 10; ++r) seen.insert(derive_seed(m, i, r));
  EXPECT_EQ(seen.size(), 8u * 200u * 10u);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(42);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
  Rng rng(7);
  double m1 = 0.0, m2 = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double z = rng.normal();
    m1 += z;
    m2 += z * z;
  }
  EXPECT_NEAR(m1 / n, 0.0, 0.01);
  EXPECT_NEAR(m2 / n, 1.0, 0.01);
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int k = 0; k < 70000; ++k) counts[rng.below(7)]++;
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a.normal(), b.normal());
}

TEST(ParallelFor, EveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 4u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) ASSERT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
