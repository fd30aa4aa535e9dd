#pragma once

// Sufficient conditions for exact recovery:
//  * unique witness: every support permutation owns a cell of f̂(λ) that no
//    other support permutation touches;
//  * linear independence: no non-trivial integer combination Σ c_k p_k with
//    c_k ∈ {-K..K} vanishes.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "symsparse/marginals.hpp"

namespace symsparse {

struct WitnessCell {
  std::uint32_t row;
  std::uint32_t col;
  bool operator==(const WitnessCell&) const = default;
};

struct UniqueWitnessReport {
  /// One entry per support permutation: its first witness cell in column order.
  std::vector<std::optional<WitnessCell>> witness;

  bool all_pass() const {
    for (const auto& w : witness) {
      if (!w) return false;
    }
    return true;
  }
  std::size_t failures() const {
    std::size_t f = 0;
    for (const auto& w : witness) f += w ? 0 : 1;
    return f;
  }
};

namespace detail {

// Occupancy counts of the cells of a set of matchings, saturating at 2.
class CellOccupancy {
 public:
  CellOccupancy(std::uint32_t d, std::size_t edges) : d_(d) {
    const std::uint64_t cells = std::uint64_t{d} * d;
    dense_ = cells <= (std::uint64_t{1} << 26) || cells <= 4 * edges;
    if (dense_) {
      counts_.assign(cells, 0);
    } else {
      sparse_.reserve(edges);
    }
  }

  void add(std::uint32_t row, std::uint32_t col) {
    const std::uint64_t key = std::uint64_t{row} * d_ + col;
    if (dense_) {
      if (counts_[key] < 2) ++counts_[key];
    } else {
      auto& c = sparse_[key];
      if (c < 2) ++c;
    }
  }

  std::uint8_t count(std::uint32_t row, std::uint32_t col) const {
    const std::uint64_t key = std::uint64_t{row} * d_ + col;
    if (dense_) return counts_[key];
    const auto it = sparse_.find(key);
    return it == sparse_.end() ? 0 : it->second;
  }

 private:
  std::uint32_t d_;
  bool dense_;
  std::vector<std::uint8_t> counts_;
  std::unordered_map<std::uint64_t, std::uint8_t> sparse_;
};

}  // namespace detail

/// O(K·D_λ): index every matching edge, then scan each permutation's edges in
/// column order for one with occupancy 1.
inline UniqueWitnessReport check_unique_witness(std::span<const Permutation> support,
                                                const PartitionIndexer& indexer) {
  const std::uint32_t d = indexer.size();
  std::vector<std::uint32_t> maps(support.size() * d);
  for (std::size_t k = 0; k < support.size(); ++k) {
    require(support[k].size() == indexer.n(), ErrorKind::size_mismatch,
            "support permutation size differs from shape total");
    for (std::uint32_t j = 0; j < d; ++j) maps[k * d + j] = indexer.image(support[k], j);
  }
  detail::CellOccupancy occupancy(d, maps.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    for (std::uint32_t j = 0; j < d; ++j) occupancy.add(maps[k * d + j], j);
  }
  UniqueWitnessReport report;
  report.witness.resize(support.size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    for (std::uint32_t j = 0; j < d; ++j) {
      const std::uint32_t i = maps[k * d + j];
      if (occupancy.count(i, j) == 1) {
        report.witness[k] = WitnessCell{i, j};
        break;
      }
    }
  }
  return report;
}

template <Scalar T>
UniqueWitnessReport check_unique_witness(const SparseSupportFunction<T>& f,
                                         const PartitionIndexer& indexer) {
  std::vector<Permutation> support;
  support.reserve(f.sparsity());
  for (const auto& e : f.entries()) support.push_back(e.perm);
  return check_unique_witness(std::span<const Permutation>(support), indexer);
}

// ---------------------------------------------------------------------------
// Linear independence

enum class LinearIndependence { verified, refuted, skipped };

inline std::string_view to_string(LinearIndependence s) noexcept {
  switch (s) {
    case LinearIndependence::verified: return "verified";
    case LinearIndependence::refuted: return "refuted";
    case LinearIndependence::skipped: return "skipped";
  }
  return "unknown";
}

struct LinearIndependenceVerdict {
  LinearIndependence status = LinearIndependence::skipped;
  /// Refuting coefficients c_k with Σ c_k p_k = 0 (status == refuted).
  std::vector<int> coefficients;
  /// "bitset-dp", "meet-in-the-middle", or the reason the check was skipped.
  std::string detail;
};

struct LinearIndependenceOptions {
  /// Exact search is attempted only for K <= exact_cap.
  std::size_t exact_cap = 12;
  /// Total bits allowed for the reachable-sum layers of the dynamic program.
  std::uint64_t dp_bit_budget = std::uint64_t{1} << 28;
  /// Largest half-table (2K+1)^⌈K/2⌉ for meet-in-the-middle.
  std::uint64_t mitm_budget = std::uint64_t{1} << 24;
};

namespace detail {

// dst |= src shifted by `shift` bit positions (negative shifts move down).
inline void or_shifted(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                       std::int64_t shift) {
  const auto words = static_cast<std::int64_t>(src.size());
  const std::int64_t word_shift = shift >= 0 ? shift / 64 : -((-shift + 63) / 64);
  const int bit_shift = static_cast<int>(shift - word_shift * 64);  // 0..63
  for (std::int64_t w = 0; w < words; ++w) {
    const std::uint64_t v = src[w];
    if (v == 0) continue;
    const std::int64_t lo = w + word_shift;
    if (lo >= 0 && lo < words) dst[lo] |= v << bit_shift;
    if (bit_shift != 0 && lo + 1 >= 0 && lo + 1 < words) dst[lo + 1] |= v >> (64 - bit_shift);
  }
}

inline bool test_bit(const std::vector<std::uint64_t>& b, std::int64_t pos) {
  return pos >= 0 && pos < static_cast<std::int64_t>(b.size() * 64) &&
         ((b[pos / 64] >> (pos % 64)) & 1u);
}

inline void set_bit(std::vector<std::uint64_t>& b, std::int64_t pos) {
  if (pos >= 0 && pos < static_cast<std::int64_t>(b.size() * 64)) b[pos / 64] |= 1ull << (pos % 64);
}

// Reachable-sum dynamic program over layers k = 0..K'-1: layer k holds the
// sums Σ_{i<=k} c_i v_i reachable with a non-zero coefficient prefix.
inline std::optional<std::vector<int>> li_bitset_dp(std::span<const std::int64_t> v, int bound,
                                                    std::int64_t range) {
  const std::int64_t width = 2 * range + 1;
  const auto words = static_cast<std::size_t>((width + 63) / 64);
  std::vector<std::vector<std::uint64_t>> layers(v.size(),
                                                 std::vector<std::uint64_t>(words, 0));
  for (std::size_t k = 0; k < v.size(); ++k) {
    auto& layer = layers[k];
    for (int c = -bound; c <= bound; ++c) {
      if (k > 0) or_shifted(layer, layers[k - 1], c * v[k]);
      if (c != 0) set_bit(layer, range + c * v[k]);
    }
  }
  if (!test_bit(layers.back(), range)) return std::nullopt;
  std::vector<int> coeffs(v.size(), 0);
  std::int64_t sum = 0;
  for (std::size_t k = v.size(); k-- > 0;) {
    bool placed = false;
    for (int c = -bound; c <= bound && !placed; ++c) {
      if (k > 0 && test_bit(layers[k - 1], range + sum - c * v[k])) {
        coeffs[k] = c;
        sum -= c * v[k];
        placed = true;
      }
    }
    if (placed) continue;
    for (int c = -bound; c <= bound; ++c) {
      if (c != 0 && sum == c * v[k]) {
        coeffs[k] = c;
        return coeffs;
      }
    }
    return std::nullopt;  // unreachable when the layers are consistent
  }
  return coeffs;
}

inline std::optional<std::vector<int>> li_meet_in_middle(std::span<const std::int64_t> v,
                                                         int bound) {
  const std::size_t half = v.size() / 2;
  const std::uint64_t base = 2 * static_cast<std::uint64_t>(bound) + 1;
  const auto decode = [&](std::uint64_t code, std::size_t first, std::size_t count,
                          std::vector<int>& out) {
    for (std::size_t t = 0; t < count; ++t) {
      out[first + t] = static_cast<int>(code % base) - bound;
      code /= base;
    }
  };
  // Enumerate all coefficient vectors of a block with incremental sums.
  const auto enumerate = [&](std::size_t first, std::size_t count, auto&& visit) {
    std::vector<int> digit(count, 0);
    std::int64_t sum = 0;
    for (std::size_t t = 0; t < count; ++t) sum -= bound * v[first + t];
    std::uint64_t code = 0;
    while (true) {
      if (visit(code, sum)) return;
      std::size_t t = 0;
      std::uint64_t place = 1;
      while (t < count && digit[t] == 2 * bound) {
        sum -= 2 * bound * v[first + t];
        code -= static_cast<std::uint64_t>(2 * bound) * place;
        digit[t] = 0;
        place *= base;
        ++t;
      }
      if (t == count) return;
      ++digit[t];
      sum += v[first + t];
      code += place;
    }
  };
  std::uint64_t zero_code_low = 0;
  {
    std::uint64_t place = 1;
    for (std::size_t t = 0; t < half; ++t, place *= base) zero_code_low += bound * place;
  }
  std::uint64_t zero_code_high = 0;
  {
    std::uint64_t place = 1;
    for (std::size_t t = half; t < v.size(); ++t, place *= base) zero_code_high += bound * place;
  }
  std::unordered_map<std::int64_t, std::uint64_t> low;
  std::optional<std::vector<int>> found;
  enumerate(0, half, [&](std::uint64_t code, std::int64_t sum) {
    if (code == zero_code_low) return false;
    if (sum == 0) {
      found.emplace(v.size(), 0);
      decode(code, 0, half, *found);
      return true;
    }
    low.emplace(sum, code);
    return false;
  });
  if (found) return found;
  enumerate(half, v.size() - half, [&](std::uint64_t code, std::int64_t sum) {
    if (code == zero_code_high) return false;
    if (sum == 0) {
      found.emplace(v.size(), 0);
      decode(code, half, v.size() - half, *found);
      return true;
    }
    if (const auto it = low.find(-sum); it != low.end()) {
      found.emplace(v.size(), 0);
      decode(it->second, 0, half, *found);
      decode(code, half, v.size() - half, *found);
      return true;
    }
    return false;
  });
  return found;
}

}  // namespace detail

/// Searches c ∈ {-K..K}^|values| \ {0} for Σ c_k p_k = 0. Exact values only;
/// floating values are reported as skipped.
template <Scalar T>
LinearIndependenceVerdict check_linear_independence(std::span<const T> values, std::size_t K,
                                                    const LinearIndependenceOptions& opt = {}) {
  LinearIndependenceVerdict verdict;
  if constexpr (ScalarTraits<T>::mode == ValueMode::floating) {
    verdict.detail = "float mode: exact integer relations are not decidable";
    return verdict;
  } else {
    for (const auto& v : values) {
      require(ScalarTraits<T>::is_positive(v), ErrorKind::precondition,
              "linear independence check needs positive values");
    }
    if (values.empty()) {
      verdict.status = LinearIndependence::verified;
      verdict.detail = "empty";
      return verdict;
    }
    if (K > opt.exact_cap) {
      verdict.detail = "K = " + std::to_string(K) + " exceeds exact_li_cap = " +
                       std::to_string(opt.exact_cap);
      return verdict;
    }
    // Scale to integers by the lcm of denominators.
    mpz_class lcm = 1;
    for (const auto& v : values) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den().get_mpz_t());
    std::vector<mpz_class> ints;
    mpz_class sum = 0;
    for (const auto& v : values) {
      ints.push_back(mpz_class(v.get_num() * (lcm / v.get_den())));
      sum += ints.back();
    }
    const int bound = static_cast<int>(K);
    const mpz_class range = sum * bound;
    if (range * bound >= mpz_class("4611686018427387904")) {  // 2^62
      verdict.detail = "scaled values too large for 64-bit search";
      return verdict;
    }
    std::vector<std::int64_t> v;
    for (const auto& x : ints) v.push_back(x.get_si());
    const std::int64_t r = range.get_si();
    std::optional<std::vector<int>> relation;
    const auto width_bits = static_cast<std::uint64_t>(2 * r + 1);
    std::uint64_t mitm_size = 1;
    for (std::size_t t = 0; t < (values.size() + 1) / 2 && mitm_size <= opt.mitm_budget; ++t) {
      mitm_size *= 2 * K + 1;
    }
    if (width_bits * values.size() <= opt.dp_bit_budget) {
      relation = detail::li_bitset_dp(v, bound, r);
      verdict.detail = "bitset-dp";
    } else if (mitm_size <= opt.mitm_budget) {
      relation = detail::li_meet_in_middle(v, bound);
      verdict.detail = "meet-in-the-middle";
    } else {
      verdict.detail = "search exceeds configured budgets";
      return verdict;
    }
    if (relation) {
      verdict.status = LinearIndependence::refuted;
      verdict.coefficients = std::move(*relation);
    } else {
      verdict.status = LinearIndependence::verified;
    }
    return verdict;
  }
}

template <Scalar T>
LinearIndependenceVerdict check_linear_independence(const std::vector<T>& values, std::size_t K,
                                                    const LinearIndependenceOptions& opt = {}) {
  return check_linear_independence(std::span<const T>(values), K, opt);
}

struct Condition1Report {
  UniqueWitnessReport unique_witness;
  LinearIndependenceVerdict linear_independence;

  bool holds() const {
    return unique_witness.all_pass() &&
           linear_independence.status == LinearIndependence::verified;
  }
};

template <Scalar T>
Condition1Report check_condition1(const SparseSupportFunction<T>& f,
                                  const PartitionIndexer& indexer,
                                  const LinearIndependenceOptions& opt = {}) {
  std::vector<T> values;
  for (const auto& e : f.entries()) values.push_back(e.value);
  return {check_unique_witness(f, indexer),
          check_linear_independence(std::span<const T>(values), f.sparsity(), opt)};
}

}  // namespace symsparse
