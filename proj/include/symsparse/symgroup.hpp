#pragma once

// Permutations of {1..n}, integer partitions λ of n, ordered λ-partitions
// (tabloids) and the permutation representation M^λ in matching form.
//
// Elements, partition indices and block ids are 0-based in code. Text and
// file formats use 1-based values.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symsparse/error.hpp"
#include "symsparse/random.hpp"

namespace symsparse {

using u128 = unsigned __int128;

/// Largest D_λ accepted by table-backed operations unless a caller raises it.
inline constexpr std::uint64_t kDefaultDLambdaCap = std::uint64_t{1} << 22;

namespace detail {

inline u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    const u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

inline constexpr u128 kU128Limit = u128{1} << 127;

/// a * b / d for an integral quotient, without intermediate overflow.
inline u128 mul_div_exact(u128 a, u128 b, u128 d) {
  const u128 g = gcd128(a, d);
  a /= g;
  d /= g;
  b /= d;
  u128 out = 0;
  if (__builtin_mul_overflow(a, b, &out) || out >= kU128Limit) {
    throw Error(ErrorKind::overflow, "combinatorial count exceeds 2^127");
  }
  return out;
}

inline u128 binomial128(u128 n, u128 k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 c = 1;
  for (u128 i = 1; i <= k; ++i) c = mul_div_exact(c, n - k + i, i);
  return c;
}

// Unchecked 64-bit variant; callers guarantee the result and C(n,k)*n fit.
inline std::uint64_t binomial64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace detail

inline std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

// ---------------------------------------------------------------------------
// Permutation

/// A bijection of {0..n-1}; image()[x] = σ(x).
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::uint32_t> images) : image_(std::move(images)) {
    std::vector<bool> seen(image_.size(), false);
    for (std::uint32_t y : image_) {
      require(y < image_.size() && !seen[y], ErrorKind::malformed,
              "permutation images are not a bijection");
      seen[y] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::uint32_t> img(n);
    std::iota(img.begin(), img.end(), 0u);
    return Permutation(std::move(img), Trusted{});
  }

  static Permutation from_one_based(std::span<const std::int64_t> images) {
    std::vector<std::uint32_t> img;
    img.reserve(images.size());
    for (std::int64_t v : images) {
      require(v >= 1 && v <= static_cast<std::int64_t>(images.size()), ErrorKind::malformed,
              "permutation image " + std::to_string(v) + " outside 1.." +
                  std::to_string(images.size()));
      img.push_back(static_cast<std::uint32_t>(v - 1));
    }
    return Permutation(std::move(img));
  }

  /// Product of the given 1-based cycles, e.g. from_cycles(4, {{1, 2}, {3, 4}}).
  static Permutation from_cycles(std::size_t n,
                                 const std::vector<std::vector<std::uint32_t>>& cycles) {
    std::vector<std::uint32_t> img(n);
    std::iota(img.begin(), img.end(), 0u);
    std::vector<bool> used(n, false);
    for (const auto& cycle : cycles) {
      for (std::size_t t = 0; t < cycle.size(); ++t) {
        const std::uint32_t from = cycle[t];
        const std::uint32_t to = cycle[(t + 1) % cycle.size()];
        require(from >= 1 && from <= n && to >= 1 && to <= n, ErrorKind::malformed,
                "cycle element outside 1..n");
        require(!used[from - 1], ErrorKind::malformed, "cycles are not disjoint");
        used[from - 1] = true;
        img[from - 1] = to - 1;
      }
    }
    return Permutation(std::move(img));
  }

  std::size_t size() const noexcept { return image_.size(); }
  std::uint32_t operator[](std::size_t x) const noexcept { return image_[x]; }
  std::span<const std::uint32_t> images() const noexcept { return image_; }

  std::vector<std::int64_t> one_based() const {
    std::vector<std::int64_t> out(image_.begin(), image_.end());
    for (auto& v : out) ++v;
    return out;
  }

  bool is_identity() const noexcept {
    for (std::size_t x = 0; x < image_.size(); ++x) {
      if (image_[x] != x) return false;
    }
    return true;
  }

  auto operator<=>(const Permutation&) const = default;
  bool operator==(const Permutation&) const = default;

 private:
  struct Trusted {};
  Permutation(std::vector<std::uint32_t> images, Trusted) : image_(std::move(images)) {}

  friend Permutation compose(const Permutation&, const Permutation&);
  friend Permutation inverse(const Permutation&);
  friend Permutation sample_uniform(std::size_t, Rng&);

  std::vector<std::uint32_t> image_;
};

/// (a ∘ b)(x) = a(b(x)).
inline Permutation compose(const Permutation& a, const Permutation& b) {
  require(a.size() == b.size(), ErrorKind::size_mismatch,
          "compose: permutation sizes " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()) + " differ");
  std::vector<std::uint32_t> img(a.size());
  for (std::size_t x = 0; x < img.size(); ++x) img[x] = a[b[x]];
  return Permutation(std::move(img), Permutation::Trusted{});
}

inline Permutation inverse(const Permutation& a) {
  std::vector<std::uint32_t> img(a.size());
  for (std::size_t x = 0; x < img.size(); ++x) img[a[x]] = static_cast<std::uint32_t>(x);
  return Permutation(std::move(img), Permutation::Trusted{});
}

struct CycleDecomposition {
  /// Disjoint cycles covering every element, fixed points included. Each
  /// cycle starts at its minimum; cycles are ordered by that minimum.
  std::vector<std::vector<std::uint32_t>> cycles;

  std::size_t nontrivial_cycle_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        cycles.begin(), cycles.end(), [](const auto& c) { return c.size() >= 2; }));
  }
};

inline CycleDecomposition cycle_decomposition(const Permutation& a) {
  CycleDecomposition out;
  std::vector<bool> seen(a.size(), false);
  for (std::uint32_t start = 0; start < a.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> cycle;
    for (std::uint32_t x = start; !seen[x]; x = a[x]) {
      seen[x] = true;
      cycle.push_back(x);
    }
    out.cycles.push_back(std::move(cycle));
  }
  return out;
}

/// Fisher-Yates shuffle driven by uniform_below; uniform over S_n.
inline Permutation sample_uniform(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> img(n);
  std::iota(img.begin(), img.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(img[i - 1], img[j]);
  }
  return Permutation(std::move(img), Permutation::Trusted{});
}

// ---------------------------------------------------------------------------
// LambdaShape

/// An integer partition λ1 ≥ … ≥ λr ≥ 1 of n with r ≥ 2. D_λ is kept exactly when below 2^127.
class LambdaShape {
 public:
  LambdaShape() = default;

  static LambdaShape from_parts(std::vector<std::uint32_t> parts) {
    require(parts.size() >= 2, ErrorKind::precondition,
            "shape needs at least two parts (a single part carries no information)");
    std::uint64_t n = 0;
    for (std::size_t b = 0; b < parts.size(); ++b) {
      require(parts[b] >= 1, ErrorKind::precondition, "shape parts must be positive");
      require(b == 0 || parts[b] <= parts[b - 1], ErrorKind::precondition,
              "shape parts must be weakly decreasing");
      n += parts[b];
    }
    require(n <= 0xffffffffu, ErrorKind::precondition, "shape total too large");
    LambdaShape s;
    s.parts_ = std::move(parts);
    s.n_ = static_cast<std::uint32_t>(n);
    try {
      u128 d = 1;
      u128 remaining = n;
      for (std::uint32_t part : s.parts_) {
        d = detail::mul_div_exact(d, detail::binomial128(remaining, part), 1);
        remaining -= part;
      }
      s.d_ = d;
    } catch (const Error&) {
      s.d_.reset();
    }
    return s;
  }

  /// (n-1, 1)
  static LambdaShape hook(std::uint32_t n) { return from_parts({n - 1, 1}); }

  std::uint32_t n() const noexcept { return n_; }
  std::size_t rows() const noexcept { return parts_.size(); }
  std::span<const std::uint32_t> parts() const noexcept { return parts_; }
  std::uint32_t part(std::size_t b) const noexcept { return parts_[b]; }
  bool dimension_is_exact() const noexcept { return d_.has_value(); }

  u128 d_lambda() const {
    require(d_.has_value(), ErrorKind::overflow, "D_lambda of " + to_string() + " exceeds 2^127");
    return *d_;
  }

  /// ln D_λ via lgamma; finite for every shape.
  double log_d_lambda() const {
    double v = std::lgamma(static_cast<double>(n_) + 1.0);
    for (auto p : parts_) v -= std::lgamma(static_cast<double>(p) + 1.0);
    return v;
  }

  /// Number of elements outside the first block: n - λ1.
  std::uint32_t tail_size() const noexcept { return n_ - parts_[0]; }

  bool is_first_order() const noexcept { return parts_.size() == 2 && parts_[1] == 1; }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t b = 0; b < parts_.size(); ++b) {
      if (b) s += ",";
      s += std::to_string(parts_[b]);
    }
    return s + ")";
  }

  bool operator==(const LambdaShape& o) const { return parts_ == o.parts_; }

 private:
  std::vector<std::uint32_t> parts_;
  std::uint32_t n_ = 0;
  std::optional<u128> d_ = 0;
};

inline u128 d_lambda(const LambdaShape& shape) { return shape.d_lambda(); }

// ---------------------------------------------------------------------------
// Partitions (tabloids) and their canonical ranking

/// Ordered λ-partition as a block-assignment word: block(x) for each element.
class PartitionWord {
 public:
  PartitionWord(LambdaShape shape, std::vector<std::uint16_t> blocks)
      : shape_(std::move(shape)), blocks_(std::move(blocks)) {
    require(blocks_.size() == shape_.n(), ErrorKind::size_mismatch,
            "partition word length differs from n");
    std::vector<std::uint32_t> counts(shape_.rows(), 0);
    for (std::uint16_t b : blocks_) {
      require(b < shape_.rows(), ErrorKind::malformed, "block index outside 1..r");
      ++counts[b];
    }
    for (std::size_t b = 0; b < shape_.rows(); ++b) {
      require(counts[b] == shape_.part(b), ErrorKind::malformed,
              "partition word inconsistent with shape " + shape_.to_string());
    }
  }

  static PartitionWord from_one_based(LambdaShape shape, std::span<const std::int64_t> word) {
    std::vector<std::uint16_t> blocks;
    blocks.reserve(word.size());
    for (std::int64_t b : word) {
      require(b >= 1 && b <= static_cast<std::int64_t>(shape.rows()), ErrorKind::malformed,
              "block index outside 1..r");
      blocks.push_back(static_cast<std::uint16_t>(b - 1));
    }
    return PartitionWord(std::move(shape), std::move(blocks));
  }

  const LambdaShape& shape() const noexcept { return shape_; }
  std::span<const std::uint16_t> blocks() const noexcept { return blocks_; }
  std::uint16_t block(std::size_t x) const noexcept { return blocks_[x]; }

  std::vector<std::int64_t> one_based() const {
    std::vector<std::int64_t> out(blocks_.begin(), blocks_.end());
    for (auto& v : out) ++v;
    return out;
  }

  bool operator==(const PartitionWord& o) const {
    return shape_ == o.shape_ && blocks_ == o.blocks_;
  }

 private:
  LambdaShape shape_;
  std::vector<std::uint16_t> blocks_;
};

struct PartitionIndex {
  u128 value = 0;
  auto operator<=>(const PartitionIndex&) const = default;
};

namespace detail {

struct TailEntry {
  std::uint32_t element;
  std::uint16_t block;  // >= 1
};

// Lexicographic rank of the word whose non-first-block entries are `tail`
// (sorted by element). Positions holding block 0 contribute nothing, so the
// cost depends on n - λ1 rather than n.
template <class Int, class BinomialFn, class MulDivFn>
Int rank_from_tail(const LambdaShape& shape, std::span<const TailEntry> tail, BinomialFn binom,
                   MulDivFn mul_div) {
  const std::size_t r = shape.rows();
  std::array<std::uint32_t, 64> used_small{};
  std::vector<std::uint32_t> used_large;
  std::uint32_t* used = used_small.data();
  if (r > used_small.size()) {
    used_large.assign(r, 0);
    used = used_large.data();
  }
  Int rank = 0;
  for (std::size_t t = 0; t < tail.size(); ++t) {
    const std::uint32_t p = tail[t].element;
    const std::uint16_t beta = tail[t].block;
    const Int remaining = static_cast<Int>(shape.n() - p);
    const std::uint32_t first_left = shape.part(0) - (p - static_cast<std::uint32_t>(t));
    const std::uint32_t tail_left = static_cast<std::uint32_t>(remaining) - first_left;
    // multinomial of the remaining counts = C(remaining, tail_left) * multinomial(tail counts)
    Int multi = binom(remaining, static_cast<Int>(tail_left));
    std::uint32_t rest = tail_left;
    for (std::size_t b = 1; b < r && rest > 0; ++b) {
      const std::uint32_t cb = shape.part(b) - used[b];
      multi = mul_div(multi, binom(static_cast<Int>(rest), static_cast<Int>(cb)), Int{1});
      rest -= cb;
    }
    Int smaller = first_left;
    for (std::size_t b = 1; b < beta; ++b) smaller += shape.part(b) - used[b];
    rank += mul_div(multi, smaller, remaining);
    ++used[beta];
  }
  return rank;
}

inline u128 rank_tail128(const LambdaShape& shape, std::span<const TailEntry> tail) {
  return rank_from_tail<u128>(
      shape, tail, [](u128 n, u128 k) { return binomial128(n, k); },
      [](u128 a, u128 b, u128 d) { return mul_div_exact(a, b, d); });
}

inline std::uint64_t rank_tail64(const LambdaShape& shape, std::span<const TailEntry> tail) {
  return rank_from_tail<std::uint64_t>(
      shape, tail, [](std::uint64_t n, std::uint64_t k) { return binomial64(n, k); },
      [](std::uint64_t a, std::uint64_t b, std::uint64_t d) { return a * b / d; });
}

}  // namespace detail

/// Rank of a word among all λ-partitions in lexicographic word order.
inline PartitionIndex rank_partition(const PartitionWord& w) {
  std::vector<detail::TailEntry> tail;
  for (std::uint32_t x = 0; x < w.blocks().size(); ++x) {
    if (w.block(x) != 0) tail.push_back({x, w.block(x)});
  }
  return {detail::rank_tail128(w.shape(), tail)};
}

inline PartitionWord unrank_partition(const LambdaShape& shape, PartitionIndex idx) {
  require(idx.value < shape.d_lambda(), ErrorKind::out_of_range,
          "partition index " + to_string(idx.value) + " outside 0.." +
              to_string(shape.d_lambda() - 1));
  const std::size_t r = shape.rows();
  std::vector<std::uint32_t> counts(shape.parts().begin(), shape.parts().end());
  std::vector<std::uint16_t> blocks(shape.n());
  u128 multi = shape.d_lambda();
  u128 rest = idx.value;
  for (std::uint32_t pos = 0; pos < shape.n(); ++pos) {
    const u128 remaining = shape.n() - pos;
    for (std::size_t b = 0; b < r; ++b) {
      if (counts[b] == 0) continue;
      const u128 with_b = detail::mul_div_exact(multi, counts[b], remaining);
      if (rest < with_b) {
        blocks[pos] = static_cast<std::uint16_t>(b);
        --counts[b];
        multi = with_b;
        break;
      }
      rest -= with_b;
    }
  }
  return PartitionWord(shape, std::move(blocks));
}

/// σ(t): the block of σ(x) in the result is the block of x in t.
inline PartitionWord act(const Permutation& sigma, const PartitionWord& t) {
  require(sigma.size() == t.shape().n(), ErrorKind::size_mismatch,
          "act: permutation size differs from partition size");
  std::vector<std::uint16_t> blocks(sigma.size());
  for (std::size_t x = 0; x < sigma.size(); ++x) blocks[sigma[x]] = t.block(x);
  return PartitionWord(t.shape(), std::move(blocks));
}

// ---------------------------------------------------------------------------
// Induced permutations (M^λ in matching form)

struct InducedPermutation {
  LambdaShape shape;
  /// map[j] = i such that σ(t_j) = t_i; column j of M^λ(σ) has its 1 at row map[j].
  std::vector<std::uint32_t> map;

  std::size_t cycle_count() const {
    std::vector<bool> seen(map.size(), false);
    std::size_t cycles = 0;
    for (std::size_t j = 0; j < map.size(); ++j) {
      if (seen[j]) continue;
      ++cycles;
      for (std::size_t x = j; !seen[x]; x = map[x]) seen[x] = true;
    }
    return cycles;
  }
};

/// Precomputed enumeration of all λ-partitions of one shape, stored by their
/// non-first-block elements. Immutable after construction; share freely.
class PartitionIndexer {
 public:
  explicit PartitionIndexer(LambdaShape shape, std::uint64_t cap = kDefaultDLambdaCap)
      : shape_(std::move(shape)) {
    require(shape_.d_lambda() <= cap, ErrorKind::cap_exceeded,
            "D_lambda = " + to_string(shape_.d_lambda()) + " for shape " + shape_.to_string() +
                " exceeds the cap " + std::to_string(cap));
    require(shape_.d_lambda() <= 0xffffffffu, ErrorKind::cap_exceeded,
            "D_lambda must fit in 32 bits for table-backed operations");
    size_ = static_cast<std::uint32_t>(shape_.d_lambda());
    m_ = shape_.tail_size();
    for (std::size_t b = 1; b < shape_.rows(); ++b) {
      for (std::uint32_t c = 0; c < shape_.part(b); ++c) {
        slot_block_.push_back(static_cast<std::uint16_t>(b));
      }
    }
    tails_.resize(static_cast<std::size_t>(size_) * m_);

    std::vector<std::uint16_t> word;
    for (std::size_t b = 0; b < shape_.rows(); ++b) word.insert(word.end(), shape_.part(b), b);
    std::vector<std::uint32_t> fill(shape_.rows());
    std::uint32_t idx = 0;
    do {
      std::uint32_t offset = 0;
      for (std::size_t b = 1; b < shape_.rows(); ++b) {
        fill[b] = offset;
        offset += shape_.part(b);
      }
      std::uint32_t* out = tails_.data() + static_cast<std::size_t>(idx) * m_;
      for (std::uint32_t x = 0; x < word.size(); ++x) {
        if (word[x] != 0) out[fill[word[x]]++] = x;
      }
      ++idx;
    } while (std::next_permutation(word.begin(), word.end()));
  }

  const LambdaShape& shape() const noexcept { return shape_; }
  std::uint32_t size() const noexcept { return size_; }
  std::uint32_t n() const noexcept { return shape_.n(); }

  /// Elements outside block 0 of t_index, grouped by block (ascending within a block).
  std::span<const std::uint32_t> tail(std::uint32_t index) const noexcept {
    return {tails_.data() + static_cast<std::size_t>(index) * m_, m_};
  }
  /// Block id of tail slot s.
  std::uint16_t slot_block(std::size_t s) const noexcept { return slot_block_[s]; }
  std::span<const std::uint16_t> slot_blocks() const noexcept { return slot_block_; }

  PartitionWord word(std::uint32_t index) const {
    std::vector<std::uint16_t> blocks(shape_.n(), 0);
    const auto t = tail(index);
    for (std::size_t s = 0; s < t.size(); ++s) blocks[t[s]] = slot_block_[s];
    return PartitionWord(shape_, std::move(blocks));
  }

  std::uint32_t rank(const PartitionWord& w) const {
    require(w.shape() == shape_, ErrorKind::size_mismatch, "word shape differs from indexer");
    std::vector<detail::TailEntry> tail_entries;
    for (std::uint32_t x = 0; x < w.blocks().size(); ++x) {
      if (w.block(x) != 0) tail_entries.push_back({x, w.block(x)});
    }
    return static_cast<std::uint32_t>(detail::rank_tail64(shape_, tail_entries));
  }

  /// rank(σ(t_index))
  std::uint32_t image(const Permutation& sigma, std::uint32_t index) const {
    std::array<detail::TailEntry, 32> small;
    std::vector<detail::TailEntry> large;
    detail::TailEntry* buf = small.data();
    if (m_ > small.size()) {
      large.resize(m_);
      buf = large.data();
    }
    const auto t = tail(index);
    for (std::size_t s = 0; s < m_; ++s) buf[s] = {sigma[t[s]], slot_block_[s]};
    std::sort(buf, buf + m_, [](const auto& a, const auto& b) { return a.element < b.element; });
    return static_cast<std::uint32_t>(
        detail::rank_tail64(shape_, std::span<const detail::TailEntry>(buf, m_)));
  }

  InducedPermutation induce(const Permutation& sigma) const {
    require(sigma.size() == shape_.n(), ErrorKind::size_mismatch,
            "permutation size " + std::to_string(sigma.size()) + " differs from shape total " +
                std::to_string(shape_.n()));
    InducedPermutation out{shape_, std::vector<std::uint32_t>(size_)};
    for (std::uint32_t j = 0; j < size_; ++j) out.map[j] = image(sigma, j);
    return out;
  }

 private:
  LambdaShape shape_;
  std::uint32_t size_ = 0;
  std::uint32_t m_ = 0;
  std::vector<std::uint16_t> slot_block_;
  std::vector<std::uint32_t> tails_;
};

inline InducedPermutation induced_permutation(const Permutation& sigma,
                                              const PartitionIndexer& indexer) {
  return indexer.induce(sigma);
}

inline InducedPermutation induced_permutation(const Permutation& sigma, const LambdaShape& shape,
                                              std::uint64_t cap = kDefaultDLambdaCap) {
  return PartitionIndexer(shape, cap).induce(sigma);
}

/// Number of cycles (fixed indices included) of σ acting on the λ-partitions.
inline std::size_t lambda_cycle_count(const Permutation& sigma, const PartitionIndexer& indexer) {
  return indexer.induce(sigma).cycle_count();
}

inline std::size_t lambda_cycle_count(const Permutation& sigma, const LambdaShape& shape,
                                      std::uint64_t cap = kDefaultDLambdaCap) {
  return induced_permutation(sigma, shape, cap).cycle_count();
}

}  // namespace symsparse
