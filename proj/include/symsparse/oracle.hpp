#pragma once

// Ground truth at desk scale: exhaustive minimum-support solving over S_n,
// constructive equal-mass alternatives (ℓ1 non-uniqueness), and the exact
// probability that a uniform permutation has at most one non-trivial cycle.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "symsparse/marginals.hpp"
#include "symsparse/sparsest_fit.hpp"

namespace symsparse {

/// All n! permutations in lexicographic order of their images.
inline std::vector<Permutation> all_permutations(std::size_t n) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  std::vector<Permutation> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Exact linear algebra

struct ExactSolve {
  bool consistent = false;
  std::size_t rank = 0;
  /// The solution when the system is consistent with full column rank.
  std::optional<std::vector<Rational>> x;
};

/// Gauss-Jordan elimination on the dense system A x = b over the rationals.
inline ExactSolve solve_exact(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  ExactSolve out;
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<std::size_t> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && sgn(a[p][c]) == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    const Rational inv = 1 / a[r][c];
    for (std::size_t k = c; k < cols; ++k) a[r][k] *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(a[i][c]) == 0) continue;
      const Rational factor = a[i][c];
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= factor * a[r][k];
      b[i] -= factor * b[r];
    }
    pivot_col.push_back(c);
    ++r;
  }
  out.rank = r;
  out.consistent = true;
  for (std::size_t i = r; i < rows; ++i) {
    if (sgn(b[i]) != 0) out.consistent = false;
  }
  if (out.consistent && r == cols) {
    std::vector<Rational> x(cols);
    for (std::size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    out.x = std::move(x);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Minimum-support oracle

struct L0Options {
  std::size_t k_max = 4;
  /// Stop with an error after this many candidate supports.
  std::uint64_t support_budget = 50'000'000;
};

struct L0Result {
  /// Smallest support size admitting a positive exact solution, if ≤ k_max.
  std::optional<std::size_t> min_size;
  /// Every positive solution of that size, in enumeration order.
  std::vector<SparseSupportFunction<Rational>> solutions;
  /// Permutations whose whole matching lies inside the support of M.
  std::size_t candidates = 0;
  std::size_t supports_examined = 0;
  std::size_t rank_deficient = 0;

  bool unique() const { return solutions.size() == 1; }
};

/// Finds all minimum-support g ≥ 0 with ĝ(λ) = M, exhaustively over S_n.
///
/// A support whose matrices are linearly dependent is never minimal for a
/// positive solution (moving along the null direction zeroes a coordinate
/// and yields a smaller support), so only full-rank supports are solved.
inline L0Result l0_oracle(const MarginalMatrix<Rational>& m, const L0Options& opt = {}) {
  require(m.n() <= 5, ErrorKind::cap_exceeded, "the l0 oracle is limited to n <= 5");
  require(opt.k_max <= 5, ErrorKind::cap_exceeded, "the l0 oracle is limited to k_max <= 5");
  const PartitionIndexer indexer(m.shape());
  const std::uint32_t d = indexer.size();
  L0Result result;
  if (m.empty()) {
    result.min_size = 0;
    result.solutions.emplace_back(m.n(), std::vector<SupportEntry<Rational>>{});
    return result;
  }

  const auto& cells = m.cells();
  const std::size_t words = (cells.size() + 63) / 64;
  struct Candidate {
    Permutation sigma;
    std::vector<std::uint32_t> cells;  // positions into M's cell list
    std::vector<std::uint64_t> cover;
  };
  std::vector<Candidate> cand;
  for (auto& sigma : all_permutations(m.n())) {
    Candidate c{sigma, {}, std::vector<std::uint64_t>(words, 0)};
    bool inside = true;
    for (std::uint32_t j = 0; j < d && inside; ++j) {
      const std::uint32_t i = indexer.image(sigma, j);
      const auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{i, j},
                                       [](const Cell<Rational>& x, const auto& key) {
                                         return std::tie(x.row, x.col) <
                                                std::tie(key.first, key.second);
                                       });
      if (it == cells.end() || it->row != i || it->col != j) {
        inside = false;
      } else {
        const auto pos = static_cast<std::uint32_t>(it - cells.begin());
        c.cells.push_back(pos);
        c.cover[pos / 64] |= std::uint64_t{1} << (pos % 64);
      }
    }
    if (inside) cand.push_back(std::move(c));
  }
  result.candidates = cand.size();

  std::vector<Rational> rhs;
  for (const auto& c : cells) rhs.push_back(c.value);
  std::vector<std::size_t> pick;
  std::vector<std::vector<std::uint64_t>> cover_stack;

  const auto try_support = [&]() {
    if (++result.supports_examined > opt.support_budget) {
      throw Error(ErrorKind::cap_exceeded, "l0 oracle exceeded its support budget");
    }
    const auto& cover = cover_stack.back();
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t want =
          (w + 1 == words && cells.size() % 64) ? (std::uint64_t{1} << (cells.size() % 64)) - 1
                                                 : ~std::uint64_t{0};
      if (cover[w] != want) return;
    }
    std::vector<std::vector<Rational>> a(cells.size(), std::vector<Rational>(pick.size(), 0));
    for (std::size_t t = 0; t < pick.size(); ++t) {
      for (std::uint32_t pos : cand[pick[t]].cells) a[pos][t] = 1;
    }
    const ExactSolve sol = solve_exact(std::move(a), rhs);
    if (!sol.consistent) return;
    if (!sol.x) {
      ++result.rank_deficient;
      return;
    }
    for (const auto& v : *sol.x) {
      if (sgn(v) <= 0) return;
    }
    std::vector<SupportEntry<Rational>> entries;
    for (std::size_t t = 0; t < pick.size(); ++t) {
      entries.push_back({cand[pick[t]].sigma, (*sol.x)[t]});
    }
    result.solutions.emplace_back(m.n(), std::move(entries));
  };

  // Depth-first over increasing index tuples, carrying the union of covers.
  const auto walk = [&](auto&& self, std::size_t start, std::size_t size) -> void {
    if (pick.size() == size) {
      try_support();
      return;
    }
    for (std::size_t c = start; c + (size - pick.size()) <= cand.size(); ++c) {
      auto cover = cover_stack.back();
      for (std::size_t w = 0; w < words; ++w) cover[w] |= cand[c].cover[w];
      pick.push_back(c);
      cover_stack.push_back(std::move(cover));
      self(self, c + 1, size);
      cover_stack.pop_back();
      pick.pop_back();
    }
  };

  for (std::size_t size = 1; size <= opt.k_max; ++size) {
    // D_λ·size cells can cover at most that many non-zero cells.
    if (static_cast<std::uint64_t>(d) * size < cells.size()) continue;
    cover_stack.assign(1, std::vector<std::uint64_t>(words, 0));
    walk(walk, 0, size);
    if (!result.solutions.empty()) {
      result.min_size = size;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Equal-mass alternative decompositions

template <Scalar T>
struct L1Witness {
  SparseSupportFunction<T> g;
  /// Positions in f of the two permutations that were rewritten.
  std::size_t a = 0;
  std::size_t b = 0;
  /// The factors of π = σ_b σ_a⁻¹, applied to σ_a.
  Permutation c1;
  Permutation c2;
};

template <Scalar T>
struct L1WitnessOptions {
  Tolerance tolerance{};
  /// Relative permutations with more non-trivial cycles than this only try
  /// the splits that peel off a single cycle.
  std::size_t full_split_cycles = 12;
};

namespace detail {

inline Permutation cycle_product(std::size_t n, const std::vector<std::vector<std::uint32_t>>& cyc,
                                 const std::vector<std::size_t>& which) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  for (std::size_t w : which) {
    const auto& c = cyc[w];
    for (std::size_t t = 0; t < c.size(); ++t) img[c[t]] = c[(t + 1) % c.size()];
  }
  return Permutation(std::move(img));
}

template <Scalar T>
std::optional<SparseSupportFunction<T>> rewrite_pair(const SparseSupportFunction<T>& f,
                                                     std::size_t a, std::size_t b,
                                                     const Permutation& c1a,
                                                     const Permutation& c2a) {
  const T& pa = f[a].value;
  const T& pb = f[b].value;
  const T shift = pa < pb ? pa : pb;
  std::vector<SupportEntry<T>> entries;
  // Exact cancellation leaves the entry out; in float mode a residue within
  // tolerance of zero is dropped too.
  for (std::size_t k = 0; k < f.sparsity(); ++k) {
    T v = f[k].value;
    if (k == a || k == b) v -= shift;
    if (ScalarTraits<T>::is_positive(v) && !scalar_equal(v, ScalarTraits<T>::zero())) {
      entries.push_back({f[k].perm, v});
    }
  }
  entries.push_back({c1a, shift});
  entries.push_back({c2a, shift});
  return SparseSupportFunction<T>(f.n(), std::move(entries));
}

}  // namespace detail

/// Looks for g ≠ f with ĝ(λ) = f̂(λ) and ‖g‖₁ = ‖f‖₁ by rewriting one pair
/// σ_a, σ_b of the support: with π = σ_b σ_a⁻¹ split into commuting factors
/// c1 c2 built from its disjoint cycles, m·[σ_a] + m·[σ_b] is replaced by
/// m·[c1 σ_a] + m·[c2 σ_a], m = min(p_a, p_b). For the first-order shape
/// this always balances when π has two or more non-trivial cycles; for other
/// shapes every candidate is checked and only verified ones are returned.
/// nullopt means no candidate verified, not that f is ℓ1-unique.
template <Scalar T>
std::optional<L1Witness<T>> l1_witness(const SparseSupportFunction<T>& f,
                                       const PartitionIndexer& indexer,
                                       const L1WitnessOptions<T>& opt = {}) {
  require(f.sparsity() >= 2, ErrorKind::precondition, "the l1 witness needs K >= 2");
  require(f.n() == indexer.n(), ErrorKind::size_mismatch, "function and shape sizes differ");
  const auto target = fourier_coefficient(f, indexer);
  const T mass = f.l1_norm();
  for (std::size_t a = 0; a < f.sparsity(); ++a) {
    for (std::size_t b = a + 1; b < f.sparsity(); ++b) {
      const Permutation& sa = f[a].perm;
      const Permutation pi = compose(f[b].perm, inverse(sa));
      std::vector<std::vector<std::uint32_t>> cyc;
      for (auto& c : cycle_decomposition(pi).cycles) {
        if (c.size() >= 2) cyc.push_back(std::move(c));
      }
      if (cyc.size() < 2) continue;
      // subsets containing the first cycle, proper and non-empty complement
      std::vector<std::vector<std::size_t>> splits;
      if (cyc.size() <= opt.full_split_cycles) {
        const std::uint64_t total = std::uint64_t{1} << (cyc.size() - 1);
        for (std::uint64_t mask = 0; mask + 1 < total; ++mask) {
          std::vector<std::size_t> which{0};
          for (std::size_t t = 1; t < cyc.size(); ++t) {
            if ((mask >> (t - 1)) & 1u) which.push_back(t);
          }
          splits.push_back(std::move(which));
        }
      } else {
        for (std::size_t t = 0; t < cyc.size(); ++t) splits.push_back({t});
      }
      for (const auto& which : splits) {
        std::vector<std::size_t> rest;
        for (std::size_t t = 0; t < cyc.size(); ++t) {
          if (std::find(which.begin(), which.end(), t) == which.end()) rest.push_back(t);
        }
        const Permutation c1 = detail::cycle_product(f.n(), cyc, which);
        const Permutation c2 = detail::cycle_product(f.n(), cyc, rest);
        auto g = detail::rewrite_pair(f, a, b, compose(c1, sa), compose(c2, sa));
        if (!g) continue;
        if (g->same_as(f, opt.tolerance)) continue;
        if (g->sparsity() > f.sparsity() + 2) continue;
        if (!scalar_equal(g->l1_norm(), mass, opt.tolerance)) continue;
        if (!fourier_coefficient(*g, indexer).equals(target, opt.tolerance)) continue;
        return L1Witness<T>{std::move(*g), a, b, c1, c2};
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cycle-structure probabilities

/// Probability that a uniform σ ∈ S_n has at most one non-trivial cycle:
/// (1 + Σ_{l=2..n} C(n,l)(l-1)!) / n!. The identity is counted once.
inline Rational single_cycle_probability(std::size_t n) {
  require(n >= 1, ErrorKind::precondition, "n must be positive");
  // C(n,l)(l-1)! / n! = 1 / (l (n-l)!)
  Rational p = 0;
  mpz_class fact = 1;  // (n-l)!
  for (std::size_t l = n; l >= 2; --l) {
    p += Rational(1, mpz_class(static_cast<unsigned long>(l)) * fact);
    fact *= static_cast<unsigned long>(n - l + 1);
  }
  mpz_class nfact;
  mpz_fac_ui(nfact.get_mpz_t(), static_cast<unsigned long>(n));
  p += Rational(1, nfact);
  p.canonicalize();
  return p;
}

/// Σ_{l=1..n} C(n,l)(l-1)!/n!, the sum with the l = 1 term included. That
/// term counts the n one-cycle descriptions of the identity, so this exceeds
/// single_cycle_probability(n) by (n-1)/n!.
inline Rational single_cycle_sum_with_fixed_points(std::size_t n) {
  require(n >= 1, ErrorKind::precondition, "n must be positive");
  Rational p = 0;
  mpz_class fact = 1;
  for (std::size_t l = n; l >= 1; --l) {
    p += Rational(1, mpz_class(static_cast<unsigned long>(l)) * fact);
    fact *= static_cast<unsigned long>(n - l + 1);
  }
  p.canonicalize();
  return p;
}

}  // namespace symsparse
