#include <gtest/gtest.h>

#include <cmath>

#include "symsparse/io.hpp"
#include "symsparse/randmodel.hpp"
#include "symsparse/schedule.hpp"

using namespace symsparse;

namespace {

std::vector<std::uint32_t> parts_of(const LambdaShape& s) { return {s.parts().begin(), s.parts().end()}; }

}  // namespace

TEST(Random, UniformBelowStaysInRangeAndCoversIt) {
  Rng rng(71);
  std::vector<int> hits(7, 0);
  for (int t = 0; t < 7000; ++t) {
    const auto v = uniform_below(rng, 7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) {
    EXPECT_GT(h, 850);
    EXPECT_LT(h, 1150);
  }
}

TEST(Random, UniformRealStaysInInterval) {
  Rng rng(72);
  double lo = 10;
  double hi = 0;
  for (int t = 0; t < 10000; ++t) {
    const double v = uniform_real(rng, 1.0, 2.0);
    ASSERT_GE(v, 1.0);
    ASSERT_LT(v, 2.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LT(lo, 1.01);
  EXPECT_GT(hi, 1.99);
}

TEST(Random, MixSeedSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 30; ++a) {
    for (std::uint64_t b = 0; b < 30; ++b) seen.insert(mix_seed(5, {a, b}));
  }
  EXPECT_EQ(seen.size(), 900u);
  EXPECT_EQ(mix_seed(5, {1, 2}), mix_seed(5, {1, 2}));
  EXPECT_NE(mix_seed(5, {1, 2}), mix_seed(6, {1, 2}));
}

TEST(Sampler, SameSeedSameFunction) {
  RandomModelSpec spec{8, 5, ContinuousValues{1, 2}, 7};
  const auto a = io::to_json(sample_function(spec)).dump();
  const auto b = io::to_json(sample_function(spec)).dump();
  EXPECT_EQ(a, b);
  spec.seed = 8;
  EXPECT_NE(a, io::to_json(sample_function(spec)).dump());
}

TEST(Sampler, IntegerValuesInRange) {
  Rng rng(73);
  const auto f = sample_integer(6, 50, IntegerValues{3}, rng);
  for (const auto& e : f.entries()) {
    EXPECT_GE(e.value, 1);
    // merged duplicates may add up beyond T
    EXPECT_LE(e.value, 3 * (1 + static_cast<long>(f.merged_duplicates())));
  }
}

TEST(Sampler, RejectsBadModels) {
  EXPECT_THROW((RandomModelSpec{5, 2, ContinuousValues{2, 1}, 0}.validate()), Error);
  EXPECT_THROW((RandomModelSpec{5, 2, ContinuousValues{0, 1}, 0}.validate()), Error);
  EXPECT_THROW((RandomModelSpec{5, 2, IntegerValues{0}, 0}.validate()), Error);
}

TEST(Schedule, Expressions) {
  const Variables v{{"n", 200}, {"c", 0.5}, {"m", 2}, {"D", 19900}};
  EXPECT_DOUBLE_EQ(evaluate_expression("c*n*log(n)", v), 0.5 * 200 * std::log(200.0));
  EXPECT_DOUBLE_EQ(evaluate_expression("(c/m!)*n^m*log(n)", v), 0.25 * 40000 * std::log(200.0));
  EXPECT_DOUBLE_EQ(evaluate_expression("2^3^2", v), 512);
  EXPECT_DOUBLE_EQ(evaluate_expression("-2^2", v), -4);
  EXPECT_DOUBLE_EQ(evaluate_expression("D*loglog(D)", v), 19900 * std::log(std::log(19900.0)));
  EXPECT_DOUBLE_EQ(evaluate_expression("1.5e2 + sqrt(16)", v), 154);
  EXPECT_THROW(evaluate_expression("n*", v), Error);
  EXPECT_THROW(evaluate_expression("q+1", v), Error);
  EXPECT_THROW(evaluate_expression("foo(2)", v), Error);
  EXPECT_THROW(evaluate_expression("(1", v), Error);
}

TEST(Schedule, VariableReferences) {
  EXPECT_TRUE(references_variable("c*n*log(n)", "c"));
  EXPECT_FALSE(references_variable("n*log(n)", "c"));
  EXPECT_FALSE(references_variable("1e5*n", "e"));
  EXPECT_FALSE(references_variable("log(n)", "log"));
  EXPECT_TRUE(references_variable("log + 1", "log"));
}

TEST(Schedule, FloorAndValidation) {
  const auto shape = LambdaShape::hook(200);
  EXPECT_EQ(evaluate_schedule("c*n*log(n)", shape, 0.5), 529u);
  EXPECT_EQ(evaluate_schedule("c*n*log(n)", shape, 3), 3178u);
  EXPECT_EQ(evaluate_schedule("(c/m!)*n^m*log(n)", LambdaShape::from_parts({38, 2}), 0.5), 1475u);
  EXPECT_THROW(evaluate_schedule("0.5", shape, 1), Error);
  EXPECT_THROW(evaluate_schedule("log(0)", shape, 1), Error);
}

TEST(Schedule, ShapePatterns) {
  EXPECT_EQ(parts_of(shape_from_pattern("n-1,1", 10)), (std::vector<std::uint32_t>{9, 1}));
  EXPECT_EQ(parts_of(shape_from_pattern("[38,2]", 40)), (std::vector<std::uint32_t>{38, 2}));
  EXPECT_THROW(shape_from_pattern("n,1", 10), Error);
  EXPECT_THROW(shape_from_pattern("n-1.5,1.5", 10), Error);
}

TEST(Sweep, TagsAndGrid) {
  SweepSpec s;
  s.shape_pattern = "n-1,1";
  s.n_values = {20, 30};
  s.schedules = {"c*n", "n/2"};
  s.c_values = {0.5, 1};
  s.explicit_K = {3};
  s.trials = 4;
  s.seed = 1;
  const auto r = run_sweep(s);
  ASSERT_EQ(r.points.size(), 2u * (2 + 1 + 1));
  EXPECT_EQ(r.points[0].schedule_tag, "c*n @ c=0.5");
  EXPECT_EQ(r.points[0].K, 10u);
  EXPECT_EQ(r.points[2].schedule_tag, "n/2");
  EXPECT_EQ(r.points[3].schedule_tag, "explicit");
  EXPECT_EQ(r.points[3].K, 3u);
  for (const auto& p : r.points) {
    EXPECT_EQ(p.trials, 4u);
    EXPECT_LE(p.successes, 4u);
    EXPECT_FALSE(p.seconds);
  }
}

TEST(Sweep, ByteIdenticalAcrossThreadCounts) {
  SweepSpec s;
  s.shape_pattern = "n-2,2";
  s.n_values = {12};
  s.schedules = {"c*n"};
  s.c_values = {0.5, 1, 2};
  s.trials = 30;
  s.mode = CheckMode::full_recovery;
  s.seed = 99;
  const auto one = io::sweep_csv(run_sweep(s));
  s.threads = 4;
  EXPECT_EQ(one, io::sweep_csv(run_sweep(s)));
}

TEST(Sweep, ConditionOneSuccessMatchesIndividualTrials) {
  SweepSpec s;
  s.shape_pattern = "n-1,1";
  s.n_values = {15};
  s.explicit_K = {6};
  s.trials = 25;
  s.seed = 5;
  const auto r = run_sweep(s);
  const PartitionIndexer indexer(LambdaShape::hook(15));
  std::size_t expected = 0;
  for (std::size_t t = 0; t < 25; ++t) {
    Rng rng(trial_seed(5, 15, 6, t));
    const RandomModelSpec model{15, 6, ContinuousValues{}, 5};
    const auto f = std::get<SparseSupportFunction<double>>(sample_function(model, rng));
    expected += check_unique_witness(f, indexer).all_pass();
  }
  EXPECT_EQ(r.points[0].successes, expected);
}

TEST(Sweep, FullRecoveryNeverViolatesImplication) {
  SweepSpec s;
  s.shape_pattern = "n-1,1";
  s.n_values = {8};
  s.explicit_K = {2, 4, 6};
  s.trials = 40;
  s.mode = CheckMode::full_recovery;
  s.values = IntegerValues{1000};
  s.seed = 3;
  for (const auto& p : run_sweep(s).points) EXPECT_EQ(p.implication_failures, 0u) << p.K;
}

TEST(Sweep, TimingFillsSeconds) {
  SweepSpec s;
  s.shape_pattern = "n-1,1";
  s.n_values = {10};
  s.explicit_K = {2};
  s.trials = 2;
  s.timing = true;
  const auto r = run_sweep(s);
  ASSERT_TRUE(r.points[0].seconds);
  EXPECT_GE(*r.points[0].seconds, 0.0);
}

TEST(ParallelFor, RunsEveryJobAndPropagatesErrors) {
  std::vector<int> done(100, 0);
  parallel_for(100, 4, [&](std::size_t j) { done[j] += 1; });
  for (int d : done) EXPECT_EQ(d, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t j) {
                              if (j == 5) throw Error(ErrorKind::precondition, "boom");
                            }),
               Error);
}
