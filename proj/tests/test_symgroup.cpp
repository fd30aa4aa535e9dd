#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "brute.hpp"
#include "symsparse/symgroup.hpp"

using namespace symsparse;

namespace {

std::uint64_t factorial(std::uint64_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

std::uint64_t multinomial(const std::vector<std::uint32_t>& parts) {
  std::uint64_t n = std::accumulate(parts.begin(), parts.end(), std::uint64_t{0});
  std::uint64_t d = factorial(n);
  for (auto p : parts) d /= factorial(p);
  return d;
}

const std::vector<std::vector<std::uint32_t>> kShapes{
    {3, 1}, {2, 2}, {2, 1, 1}, {4, 1}, {3, 2}, {3, 1, 1}, {2, 2, 1}, {1, 1, 1, 1}, {5, 2, 1}, {4, 3}};

}  // namespace

TEST(Permutation, ComposeAppliesRightFactorFirst) {
  const auto a = Permutation::from_cycles(4, {{1, 2}});
  const auto b = Permutation::from_cycles(4, {{2, 3}});
  const auto ab = compose(a, b);
  for (std::uint32_t x = 0; x < 4; ++x) EXPECT_EQ(ab[x], a[b[x]]);
}

TEST(Permutation, InverseAndIdentity) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto p = sample_uniform(9, rng);
    EXPECT_TRUE(compose(p, inverse(p)).is_identity());
    EXPECT_TRUE(compose(inverse(p), p).is_identity());
  }
}

TEST(Permutation, RejectsNonBijections) {
  EXPECT_THROW(Permutation(std::vector<std::uint32_t>{0, 0, 1}), Error);
  const std::vector<std::int64_t> zero_based{0, 1, 2};
  EXPECT_THROW(Permutation::from_one_based(zero_based), Error);
  EXPECT_THROW(Permutation::from_cycles(4, {{1, 2}, {2, 3}}), Error);
}

TEST(Permutation, CycleDecompositionPartitionsElements) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto p = sample_uniform(12, rng);
    const auto d = cycle_decomposition(p);
    std::set<std::uint32_t> seen;
    std::size_t nontrivial = 0;
    for (const auto& c : d.cycles) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_TRUE(seen.insert(c[i]).second);
        EXPECT_EQ(p[c[i]], c[(i + 1) % c.size()]);
      }
      nontrivial += c.size() >= 2;
    }
    EXPECT_EQ(seen.size(), 12u);
    EXPECT_EQ(d.nontrivial_cycle_count(), nontrivial);
  }
}

TEST(Permutation, UniformSamplerHitsEveryElementOfS3) {
  Rng rng(5);
  std::map<Permutation, int> counts;
  for (int t = 0; t < 6000; ++t) ++counts[sample_uniform(3, rng)];
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [p, c] : counts) {
    EXPECT_GT(c, 850);
    EXPECT_LT(c, 1150);
  }
}

TEST(LambdaShape, DimensionMatchesMultinomial) {
  for (const auto& parts : kShapes) {
    const auto s = LambdaShape::from_parts(parts);
    EXPECT_EQ(static_cast<std::uint64_t>(s.d_lambda()), multinomial(parts)) << s.to_string();
  }
  EXPECT_EQ(static_cast<std::uint64_t>(LambdaShape::hook(1000).d_lambda()), 1000u);
}

TEST(LambdaShape, RejectsInvalidShapes) {
  EXPECT_THROW(LambdaShape::from_parts({1, 2}), Error);
  EXPECT_THROW(LambdaShape::from_parts({}), Error);
  EXPECT_THROW(LambdaShape::from_parts({2, 0}), Error);
}

TEST(LambdaShape, LargeDimensionsAreExact) {
  // 30! / (10!)^3 = 5550996791340
  const auto s = LambdaShape::from_parts({10, 10, 10});
  EXPECT_EQ(to_string(s.d_lambda()), "5550996791340");
}

TEST(Partitions, RankIsLexicographicPosition) {
  for (const auto& parts : kShapes) {
    const auto shape = LambdaShape::from_parts(parts);
    const auto all = brute::partitions(parts);
    for (std::size_t i = 0; i < all.size(); ++i) {
      std::vector<std::int64_t> one(all[i].begin(), all[i].end());
      for (auto& v : one) ++v;
      const auto w = PartitionWord::from_one_based(shape, one);
      EXPECT_EQ(static_cast<std::uint64_t>(rank_partition(w).value), i);
      const auto back = unrank_partition(shape, {i});
      EXPECT_EQ(back.one_based(), one);
    }
    EXPECT_THROW(unrank_partition(shape, {all.size()}), Error);
  }
}

TEST(Partitions, IndexerAgreesWithRanking) {
  for (const auto& parts : kShapes) {
    const PartitionIndexer indexer(LambdaShape::from_parts(parts));
    for (std::uint32_t i = 0; i < indexer.size(); ++i) {
      const auto w = indexer.word(i);
      EXPECT_EQ(static_cast<std::uint64_t>(rank_partition(w).value), i);
      EXPECT_EQ(indexer.rank(w), i);
    }
  }
}

TEST(Partitions, InducedMatchingMatchesBruteForce) {
  Rng rng(17);
  for (const auto& parts : kShapes) {
    const auto shape = LambdaShape::from_parts(parts);
    const PartitionIndexer indexer(shape);
    const auto all = brute::partitions(parts);
    for (int t = 0; t < 10; ++t) {
      const auto sigma = sample_uniform(shape.n(), rng);
      const auto induced = indexer.induce(sigma);
      for (std::size_t j = 0; j < all.size(); ++j) {
        const auto expected = brute::index_of(all, brute::act(sigma.images(), all[j]));
        EXPECT_EQ(induced.map[j], expected);
        EXPECT_EQ(indexer.image(sigma, static_cast<std::uint32_t>(j)), expected);
      }
    }
  }
}

TEST(Partitions, InductionIsAHomomorphism) {
  Rng rng(23);
  const PartitionIndexer indexer(LambdaShape::from_parts({3, 2, 1}));
  for (int t = 0; t < 20; ++t) {
    const auto a = sample_uniform(6, rng);
    const auto b = sample_uniform(6, rng);
    const auto ia = indexer.induce(a).map;
    const auto ib = indexer.induce(b).map;
    const auto iab = indexer.induce(compose(a, b)).map;
    for (std::size_t j = 0; j < ia.size(); ++j) EXPECT_EQ(iab[j], ia[ib[j]]);
  }
}

TEST(Partitions, CapGuardsDimension) {
  EXPECT_THROW(PartitionIndexer(LambdaShape::from_parts({5, 5, 5}), 1000), Error);
  try {
    PartitionIndexer(LambdaShape::from_parts({5, 5, 5}), 1000);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cap_exceeded);
  }
}

TEST(Partitions, HookIndexIsReversedElement) {
  const PartitionIndexer indexer(LambdaShape::hook(7));
  for (std::uint32_t i = 0; i < 7; ++i) {
    ASSERT_EQ(indexer.tail(i).size(), 1u);
    EXPECT_EQ(indexer.tail(i)[0], 6 - i);
  }
}

TEST(Partitions, LambdaCycleCountOfIdentityIsDimension) {
  const auto shape = LambdaShape::from_parts({3, 2});
  EXPECT_EQ(lambda_cycle_count(Permutation::identity(5), shape), 10u);
  // a transposition fixes a partition iff both elements share a block
  const auto tau = Permutation::from_cycles(5, {{1, 2}});
  const auto all = brute::partitions({3, 2});
  std::size_t fixed = 0;
  for (const auto& w : all) fixed += w[0] == w[1];
  EXPECT_EQ(lambda_cycle_count(tau, shape), fixed + (all.size() - fixed) / 2);
}

TEST(LambdaShape, HugeDimensionKeepsOnlyTheLog) {
  const auto s = LambdaShape::from_parts({50, 30, 20});
  EXPECT_FALSE(s.dimension_is_exact());
  EXPECT_THROW(s.d_lambda(), Error);
  const double expected = std::lgamma(101.0) - std::lgamma(51.0) - std::lgamma(31.0) - std::lgamma(21.0);
  EXPECT_NEAR(s.log_d_lambda(), expected, 1e-9);
  EXPECT_THROW(PartitionIndexer{s}, Error);
  EXPECT_TRUE(LambdaShape::from_parts({10, 10, 10}).dimension_is_exact());
}
