#include <gtest/gtest.h>

#include "brute.hpp"
#include "symsparse/fixtures.hpp"
#include "symsparse/marginals.hpp"
#include "symsparse/randmodel.hpp"

using namespace symsparse;

namespace {

template <class T>
void expect_matches_dense(const MarginalMatrix<T>& m, const std::vector<std::vector<T>>& dense) {
  std::size_t nonzero = 0;
  for (std::uint32_t i = 0; i < dense.size(); ++i) {
    for (std::uint32_t j = 0; j < dense.size(); ++j) {
      const T* v = m.find(i, j);
      if (dense[i][j] == T(0)) {
        EXPECT_EQ(v, nullptr);
      } else {
        ++nonzero;
        ASSERT_NE(v, nullptr);
        EXPECT_EQ(*v, dense[i][j]);
      }
    }
  }
  EXPECT_EQ(m.size(), nonzero);
}

}  // namespace

TEST(Fourier, MatchesDenseBruteForce) {
  Rng rng(31);
  for (const std::vector<std::uint32_t>& parts :
       {std::vector<std::uint32_t>{3, 1}, {2, 2}, {2, 1, 1}, {3, 2}, {2, 2, 1}, {4, 1, 1}}) {
    const auto shape = LambdaShape::from_parts(parts);
    for (int t = 0; t < 10; ++t) {
      const auto f = sample_integer(shape.n(), 1 + t % 5, IntegerValues{50}, rng);
      expect_matches_dense(fourier_coefficient(f, shape), brute::marginal(f, parts));
    }
  }
}

TEST(Fourier, FirstOrderIsPositionMatrix) {
  // at (n-1,1) cell (i,j) counts mass of permutations sending element n-1-j to n-1-i
  Rng rng(2);
  const auto f = sample_integer(6, 4, IntegerValues{9}, rng);
  const auto m = fourier_coefficient(f, LambdaShape::hook(6));
  for (std::uint32_t i = 0; i < 6; ++i) {
    for (std::uint32_t j = 0; j < 6; ++j) {
      Rational expected = 0;
      for (const auto& e : f.entries()) {
        if (e.perm[5 - j] == 5 - i) expected += e.value;
      }
      const Rational* v = m.find(i, j);
      EXPECT_EQ(v ? *v : Rational(0), expected);
    }
  }
}

TEST(Fourier, EmptyFunctionGivesEmptyMatrix) {
  const SparseSupportFunction<Rational> f(4, {});
  EXPECT_TRUE(fourier_coefficient(f, LambdaShape::hook(4)).empty());
}

TEST(Fourier, SizeMismatchIsRejected) {
  const auto f = fixtures::equal_pair(4, Rational(1));
  EXPECT_THROW(fourier_coefficient(f, LambdaShape::hook(5)), Error);
}

TEST(Fourier, QuadrupleIdentityHolds) {
  for (std::size_t n : {4, 6, 10}) {
    const auto [lhs, rhs] = fixtures::quadruple_identity(n);
    EXPECT_TRUE(lhs.equals(rhs));
    EXPECT_FALSE(lhs.empty());
  }
}

TEST(Fourier, VerifyMarginalLineSums) {
  Rng rng(8);
  const auto f = sample_integer(7, 5, IntegerValues{100}, rng);
  const auto m = fourier_coefficient(f, LambdaShape::from_parts({4, 2, 1}));
  const auto report = verify_marginal(m, std::optional<Rational>(f.l1_norm()));
  EXPECT_TRUE(report.ok);
  EXPECT_EQ(report.line_sum, f.l1_norm());
  const auto wrong = verify_marginal(m, std::optional<Rational>(f.l1_norm() + 1));
  EXPECT_FALSE(wrong.ok);
  EXPECT_FALSE(wrong.mass_ok);
}

TEST(Fourier, VerifyMarginalFlagsBrokenRows) {
  const auto shape = LambdaShape::hook(3);
  // total 6 over 3 lines: each line should carry 2
  const MarginalMatrix<Rational> m(shape, {{0, 0, Rational(1)}, {1, 1, Rational(2)}, {2, 2, Rational(3)}});
  const auto r = verify_marginal(m);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.line_sum, 2);
  EXPECT_EQ(r.bad_rows, (std::vector<std::uint32_t>{0, 2}));
  EXPECT_EQ(r.bad_cols, (std::vector<std::uint32_t>{0, 2}));
}

TEST(Fourier, FloatAgreesWithExact) {
  Rng rng(4);
  const auto f = sample_integer(6, 6, IntegerValues{1000}, rng);
  std::vector<SupportEntry<double>> entries;
  for (const auto& e : f.entries()) entries.push_back({e.perm, e.value.get_d()});
  const SparseSupportFunction<double> g(6, entries);
  const auto shape = LambdaShape::from_parts({3, 3});
  const auto me = fourier_coefficient(f, shape);
  const auto mf = fourier_coefficient(g, shape);
  ASSERT_EQ(me.size(), mf.size());
  for (std::size_t c = 0; c < me.size(); ++c) {
    EXPECT_EQ(me.cells()[c].row, mf.cells()[c].row);
    EXPECT_EQ(me.cells()[c].col, mf.cells()[c].col);
    EXPECT_DOUBLE_EQ(me.cells()[c].value.get_d(), mf.cells()[c].value);
  }
}

TEST(SupportFunction, MergesRepeatedPermutations) {
  const auto p = Permutation::from_cycles(4, {{1, 2}});
  const SparseSupportFunction<Rational> f(4, {{p, Rational(1)}, {p, Rational(2)}});
  EXPECT_EQ(f.sparsity(), 1u);
  EXPECT_EQ(f.merged_duplicates(), 1u);
  EXPECT_EQ(*f.value_of(p), Rational(3));
}

TEST(SupportFunction, RejectsNonPositiveValues) {
  const auto p = Permutation::identity(3);
  EXPECT_THROW(SparseSupportFunction<Rational>(3, {{p, Rational(0)}}), Error);
  EXPECT_THROW(SparseSupportFunction<double>(3, {{p, -1.0}}), Error);
}

TEST(MarginalMatrix, RejectsBadCells) {
  const auto shape = LambdaShape::hook(3);
  EXPECT_THROW(MarginalMatrix<Rational>(shape, {{3, 0, Rational(1)}}), Error);
  EXPECT_THROW(MarginalMatrix<Rational>(shape, {{0, 0, Rational(0)}}), Error);
  EXPECT_THROW(MarginalMatrix<Rational>(shape, {{0, 0, Rational(1)}, {0, 0, Rational(2)}}), Error);
}
