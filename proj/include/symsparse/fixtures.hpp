#pragma once

// Built-in instances: the four permutations σ1 = (1 2), σ2 = (3 4),
// σ3 = (1 2)(3 4), σ4 = id whose first-order matrices satisfy
// M(σ1) + M(σ2) = M(σ3) + M(σ4) for every n ≥ 4, the three weightings of that
// quadruple that defeat sparsity-only uniqueness, and the disjoint-cycle pair.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "symsparse/marginals.hpp"

namespace symsparse::fixtures {

inline std::array<Permutation, 4> transposition_quadruple(std::size_t n) {
  require(n >= 4, ErrorKind::precondition, "the (1 2)/(3 4) quadruple needs n >= 4");
  return {Permutation::from_cycles(n, {{1, 2}}), Permutation::from_cycles(n, {{3, 4}}),
          Permutation::from_cycles(n, {{1, 2}, {3, 4}}), Permutation::identity(n)};
}

/// Both sides of M(σ1) + M(σ2) = M(σ3) + M(σ4) at λ = (n-1, 1), unit weights.
inline std::pair<MarginalMatrix<Rational>, MarginalMatrix<Rational>> quadruple_identity(
    std::size_t n) {
  const auto s = transposition_quadruple(n);
  const PartitionIndexer indexer(LambdaShape::hook(static_cast<std::uint32_t>(n)));
  const SparseSupportFunction<Rational> lhs(n, {{s[0], Rational(1)}, {s[1], Rational(1)}});
  const SparseSupportFunction<Rational> rhs(n, {{s[2], Rational(1)}, {s[3], Rational(1)}});
  return {fourier_coefficient(lhs, indexer), fourier_coefficient(rhs, indexer)};
}

/// Weights p_i on σ_i (p1 <= p2): a 3-sparse function g with the same
/// marginal exists, g(σ2) = p2 - p1, g(σ3) = p3 + p1, g(σ4) = p4 + p1.
inline SparseSupportFunction<Rational> four_weight(std::size_t n,
                                                      const std::array<Rational, 4>& p) {
  require(p[0] <= p[1], ErrorKind::precondition, "the four-weight case assumes p1 <= p2");
  const auto s = transposition_quadruple(n);
  return SparseSupportFunction<Rational>(
      n, {{s[0], p[0]}, {s[1], p[1]}, {s[2], p[2]}, {s[3], p[3]}});
}

inline SparseSupportFunction<Rational> four_weight_alternative(
    std::size_t n, const std::array<Rational, 4>& p) {
  const auto s = transposition_quadruple(n);
  std::vector<SupportEntry<Rational>> entries;
  if (p[1] != p[0]) entries.push_back({s[1], Rational(p[1] - p[0])});
  entries.push_back({s[2], Rational(p[2] + p[0])});
  entries.push_back({s[3], Rational(p[3] + p[0])});
  return SparseSupportFunction<Rational>(n, std::move(entries));
}

/// f(σ1) = f(σ2) = p: two 2-sparse solutions.
inline SparseSupportFunction<Rational> equal_pair(std::size_t n, const Rational& p) {
  const auto s = transposition_quadruple(n);
  return SparseSupportFunction<Rational>(n, {{s[0], p}, {s[1], p}});
}

/// Weights on σ1, σ2, σ3 only (p1 <= p2): linearly independent support, yet
/// (p2 - p1) M(σ2) + (p3 + p1) M(σ3) + p1 M(σ4) gives the same marginal.
inline SparseSupportFunction<Rational> three_weight(std::size_t n,
                                                      const std::array<Rational, 3>& p) {
  require(p[0] <= p[1], ErrorKind::precondition, "the three-weight case assumes p1 <= p2");
  const auto s = transposition_quadruple(n);
  return SparseSupportFunction<Rational>(n, {{s[0], p[0]}, {s[1], p[1]}, {s[2], p[2]}});
}

/// f = p1 [(1 2)] + p2 [(3 4)]: two permutations with disjoint cycles.
inline SparseSupportFunction<Rational> disjoint_cycle_pair(std::size_t n, const Rational& p1,
                                                           const Rational& p2) {
  const auto s = transposition_quadruple(n);
  return SparseSupportFunction<Rational>(n, {{s[0], p1}, {s[1], p2}});
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"four-weight", "equal-pair",
                                              "three-weight", "disjoint-pair"};
  return names;
}

/// Named fixture with its default weights.
inline SparseSupportFunction<Rational> named_fixture(const std::string& name, std::size_t n) {
  if (name == "four-weight") {
    return four_weight(n, {Rational(1), Rational(2), Rational(3), Rational(4)});
  }
  if (name == "equal-pair") return equal_pair(n, Rational(1));
  if (name == "three-weight") return three_weight(n, {Rational(1), Rational(2), Rational(3)});
  if (name == "disjoint-pair") return disjoint_cycle_pair(n, Rational(1), Rational(2));
  throw Error(ErrorKind::precondition, "unknown fixture '" + name + "'");
}

}  // namespace symsparse::fixtures
