#pragma once

// Sparsest-fit recovery of f from f̂(λ).
//
// The non-zero cells of f̂(λ) are grouped by value and scanned in ascending
// order. Each value is either a subset sum of the values discovered so far
// (the cells then belong to every member of that subset) or a new support
// value. Membership sets are turned back into permutations and the result is
// checked against the input before it is returned.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symsparse/condition1.hpp"
#include "symsparse/marginals.hpp"

namespace symsparse {

struct CellRef {
  std::uint32_t row;
  std::uint32_t col;
  bool operator==(const CellRef&) const = default;
};

template <Scalar T>
struct ValueGroup {
  T value;
  std::vector<CellRef> cells;
};

/// Why recovery stopped. value_index is the 1-based position of the
/// offending value in ascending order, when one is responsible.
struct AbortCertificate {
  std::string stage;
  std::string detail;
  std::optional<std::size_t> value_index;
};

/// Cells grouped by equal value (exact mode) or by the float tolerance
/// measured from the smallest value of a group; groups ascend by value.
template <Scalar T>
std::vector<ValueGroup<T>> build_value_groups(const MarginalMatrix<T>& m,
                                              const Tolerance& tol = {}) {
  const auto& cells = m.cells();
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cells[a].value < cells[b].value; });
  std::vector<ValueGroup<T>> groups;
  for (std::size_t idx : order) {
    const auto& c = cells[idx];
    if (groups.empty() || !scalar_equal(groups.back().value, c.value, tol)) {
      groups.push_back({c.value, {}});
    }
    groups.back().cells.push_back({c.row, c.col});
  }
  return groups;
}

/// Candidate policy that allows every discovered value in every subset.
struct AnySubset {
  template <Scalar T>
  void candidates(const ValueGroup<T>&, std::size_t discovered,
                  std::vector<std::uint32_t>& out) const {
    out.resize(discovered);
    std::iota(out.begin(), out.end(), 0u);
  }
  template <Scalar T>
  void assign(const ValueGroup<T>&, std::span<const std::uint32_t>) {}
};

/// Candidate policy using the matching structure of M^λ(σ): a support
/// permutation occupies exactly one cell per row and per column, so once a
/// value has been placed in row i (or column j) it cannot be part of another
/// cell of that row (column).
class MatchingExclusion {
 public:
  explicit MatchingExclusion(std::uint32_t dimension) : rows_(dimension), cols_(dimension) {}

  template <Scalar T>
  void candidates(const ValueGroup<T>& g, std::size_t discovered,
                  std::vector<std::uint32_t>& out) const {
    out.clear();
    const std::size_t words = (discovered + 63) / 64;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t mask = ~std::uint64_t{0};
      if (w + 1 == words && discovered % 64 != 0) mask = (std::uint64_t{1} << (discovered % 64)) - 1;
      for (const auto& c : g.cells) {
        mask &= ~word(rows_[c.row], w) & ~word(cols_[c.col], w);
        if (mask == 0) break;
      }
      while (mask != 0) {
        out.push_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(mask)));
        mask &= mask - 1;
      }
    }
  }

  template <Scalar T>
  void assign(const ValueGroup<T>& g, std::span<const std::uint32_t> members) {
    for (std::uint32_t k : members) {
      for (const auto& c : g.cells) {
        set(rows_[c.row], k);
        set(cols_[c.col], k);
      }
    }
  }

 private:
  static std::uint64_t word(const std::vector<std::uint64_t>& bits, std::size_t w) {
    return w < bits.size() ? bits[w] : 0;
  }
  static void set(std::vector<std::uint64_t>& bits, std::uint32_t k) {
    if (bits.size() <= k / 64) bits.resize(k / 64 + 1, 0);
    bits[k / 64] |= std::uint64_t{1} << (k % 64);
  }

  std::vector<std::vector<std::uint64_t>> rows_;
  std::vector<std::vector<std::uint64_t>> cols_;
};

namespace detail {

// All subsets (up to `limit`) of a descending list of positive values whose
// sum matches a target. Depth-first with two prunings valid for positive
// values: a branch stops once the remaining values cannot reach the target,
// and a value is only extended if something at least as large as the
// smallest value can still follow it.
template <Scalar T>
class SubsetSumSearch {
 public:
  SubsetSumSearch(std::span<const T> descending, const T& slack)
      : values_(descending), slack_(slack), suffix_(descending.size() + 1) {
    suffix_[descending.size()] = ScalarTraits<T>::zero();
    for (std::size_t i = descending.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + descending[i];
  }

  /// Returns positions into the value list; stops after `limit` subsets.
  std::vector<std::vector<std::uint32_t>> find(const T& target, std::size_t limit) {
    found_.clear();
    limit_ = limit;
    chosen_.clear();
    if (!values_.empty()) search(0, target);
    return std::move(found_);
  }

 private:
  // first position >= start whose value is <= bound (values descend)
  std::size_t first_at_most(std::size_t start, const T& bound) const {
    const auto it = std::partition_point(values_.begin() + static_cast<std::ptrdiff_t>(start),
                                         values_.end(),
                                         [&](const T& v) { return v > bound; });
    return static_cast<std::size_t>(it - values_.begin());
  }

  void search(std::size_t start, const T& remaining) {
    const std::size_t count = values_.size();
    // the remaining amount is one of the values
    for (std::size_t i = first_at_most(start, T(remaining + slack_));
         i < count && values_[i] >= remaining - slack_; ++i) {
      chosen_.push_back(static_cast<std::uint32_t>(i));
      found_.push_back(chosen_);
      chosen_.pop_back();
      if (found_.size() >= limit_) return;
    }
    // or a value followed by at least one more
    const T& smallest = values_.back();
    const T extend_bound = remaining - smallest + slack_;
    for (std::size_t i = first_at_most(start, extend_bound); i + 1 < count; ++i) {
      if (suffix_[i] < remaining - slack_) break;
      chosen_.push_back(static_cast<std::uint32_t>(i));
      search(i + 1, T(remaining - values_[i]));
      chosen_.pop_back();
      if (found_.size() >= limit_) return;
    }
  }

  std::span<const T> values_;
  T slack_;
  std::vector<T> suffix_;
  std::vector<std::uint32_t> chosen_;
  std::vector<std::vector<std::uint32_t>> found_;
  std::size_t limit_ = 0;
};

template <Scalar T>
T match_slack(const T& target, const Tolerance& tol) {
  if constexpr (ScalarTraits<T>::mode == ValueMode::exact) {
    return ScalarTraits<T>::zero();
  } else {
    return tol.window(target);
  }
}

inline std::string format_members(std::span<const std::uint32_t> ks) {
  std::string s = "{";
  for (std::size_t t = 0; t < ks.size(); ++t) {
    if (t) s += ",";
    s += "p" + std::to_string(ks[t] + 1);
  }
  return s + "}";
}

// Sorted sums of all pairs of discovered values. New pairs are buffered and
// merged in on the next lookup; in float mode a bucket directory over the
// sorted sums makes a lookup O(1) on average.
template <Scalar T>
class PairSumIndex {
 public:
  struct Members {
    std::uint32_t a;
    std::uint32_t b;
  };

  void add(std::uint32_t id, std::span<const T> values) {
    for (std::uint32_t other = 0; other < id; ++other) {
      fresh_.push_back({T(values[other] + values[id]), {other, id}});
    }
  }

  std::size_t size() const noexcept { return sums_.size() + fresh_.size(); }

  /// For each query t, calls f(t, members) on pairs whose sum lies in
  /// [lo[t], hi[t]]; stops as soon as f returns true.
  template <class F>
  bool any_in(std::span<const T> lo, std::span<const T> hi, F&& f) {
    compact();
    if (sums_.empty()) return false;
    constexpr std::size_t kBatch = 16;
    std::array<std::size_t, kBatch> first{};
    for (std::size_t base = 0; base < lo.size(); base += kBatch) {
      const std::size_t count = std::min(kBatch, lo.size() - base);
      if constexpr (ScalarTraits<T>::mode == ValueMode::floating) {
        // two rounds of prefetching hide most of the memory latency
        for (std::size_t t = 0; t < count; ++t) {
          first[t] = bucket_of(lo[base + t]);
          __builtin_prefetch(&directory_[first[t]]);
        }
        for (std::size_t t = 0; t < count; ++t) {
          first[t] = directory_[first[t]];
          __builtin_prefetch(&sums_[std::min(first[t], sums_.size() - 1)]);
        }
      } else {
        for (std::size_t t = 0; t < count; ++t) {
          first[t] = static_cast<std::size_t>(
              std::lower_bound(sums_.begin(), sums_.end(), lo[base + t]) - sums_.begin());
        }
      }
      for (std::size_t t = 0; t < count; ++t) {
        const T& l = lo[base + t];
        const T& h = hi[base + t];
        for (std::size_t i = first[t]; i < sums_.size() && !(h < sums_[i]); ++i) {
          if (!(sums_[i] < l) && f(base + t, members_[i])) return true;
        }
      }
    }
    return false;
  }

 private:
  struct Entry {
    T sum;
    Members members;
  };

  std::size_t bucket_of(double x) const {
    const double pos = (x - base_) / width_;
    if (!(pos > 1.0)) return 0;
    if (pos >= static_cast<double>(directory_.size())) return directory_.size() - 1;
    return static_cast<std::size_t>(pos) - 1;
  }

  void compact() {
    if (fresh_.empty()) return;
    const auto by_sum = [](const Entry& x, const Entry& y) { return x.sum < y.sum; };
    std::sort(fresh_.begin(), fresh_.end(), by_sum);
    std::vector<T> sums;
    std::vector<Members> members;
    sums.reserve(size());
    members.reserve(size());
    std::size_t i = 0;
    for (const Entry& e : fresh_) {
      for (; i < sums_.size() && !(e.sum < sums_[i]); ++i) {
        sums.push_back(std::move(sums_[i]));
        members.push_back(members_[i]);
      }
      sums.push_back(e.sum);
      members.push_back(e.members);
    }
    for (; i < sums_.size(); ++i) {
      sums.push_back(std::move(sums_[i]));
      members.push_back(members_[i]);
    }
    sums_.swap(sums);
    members_.swap(members);
    fresh_.clear();
    if constexpr (ScalarTraits<T>::mode == ValueMode::floating) {
      base_ = sums_.front();
      const double span = sums_.back() - base_;
      width_ = span > 0 ? span / static_cast<double>(sums_.size()) : 1.0;
      directory_.assign(sums_.size() + 1, 0);
      std::size_t j = 0;
      for (std::size_t b = 0; b < directory_.size(); ++b) {
        const double edge = base_ + width_ * static_cast<double>(b);
        while (j < sums_.size() && sums_[j] < edge) ++j;
        directory_[b] = static_cast<std::uint32_t>(j);
      }
    }
  }

  std::vector<T> sums_;
  std::vector<Members> members_;
  std::vector<Entry> fresh_;
  std::vector<std::uint32_t> directory_;
  double base_ = 0.0;
  double width_ = 1.0;
};

// Finds one subset of the pool matching the target, trying subset sizes in
// ascending order. Members are taken in pool order (descending value) and the
// last two come from the pair index, so a size-s query costs about
// |pool|^(s-2) lookups.
template <Scalar T>
class FirstMatchSearch {
 public:
  /// `slot` maps every discovered id to 0 and is restored on return.
  FirstMatchSearch(std::span<const T> descending, std::span<const std::uint32_t> ids,
                   PairSumIndex<T>& index, std::vector<std::uint32_t>& slot, const T& slack)
      : values_(descending), ids_(ids), index_(index), slot_(slot), slack_(slack) {}

  std::optional<std::vector<std::uint32_t>> find(const T& target) {
    if (values_.empty()) return std::nullopt;
    for (std::size_t p = 0; p < ids_.size(); ++p) slot_[ids_[p]] = static_cast<std::uint32_t>(p + 1);
    std::optional<std::vector<std::uint32_t>> hit;
    const T& vmax = values_.front();
    const T& vmin = values_.back();
    for (std::size_t s = 1; !hit; ++s) {
      const T size(static_cast<double>(s));
      if (vmin * size > target + slack_) break;
      if (vmax * size < target - slack_) continue;
      if (s == 1) {
        const auto it = std::partition_point(values_.begin(), values_.end(),
                                             [&](const T& v) { return v > target + slack_; });
        if (it != values_.end() && !(*it < target - slack_)) {
          hit = std::vector<std::uint32_t>{ids_[static_cast<std::size_t>(it - values_.begin())]};
        }
      } else {
        chosen_.clear();
        if (extend(0, s - 2, target)) hit = chosen_;
      }
    }
    for (std::uint32_t id : ids_) slot_[id] = 0;
    return hit;
  }

 private:
  // pool position + 1 of a discovered id, 0 when outside the pool
  bool pair_after(const typename PairSumIndex<T>::Members& m, std::uint32_t after) const {
    return slot_[m.a] > after && slot_[m.b] > after;
  }

  bool extend(std::size_t start, std::size_t need, const T& remaining) {
    if (need == 0) {
      const T lo(remaining - slack_);
      const T hi(remaining + slack_);
      return index_.any_in(std::span<const T>(&lo, 1), std::span<const T>(&hi, 1),
                           [&](std::size_t, const auto& m) {
                             if (!pair_after(m, static_cast<std::uint32_t>(start))) return false;
                             chosen_.push_back(m.a);
                             chosen_.push_back(m.b);
                             return true;
                           });
    }
    const T& vmin = values_.back();
    // after taking v, need - 1 more values and a pair (all <= v, all >= vmin) remain
    const T upper = remaining - vmin * T(static_cast<double>(need + 1)) + slack_;
    const T rest(static_cast<double>(need + 1));
    auto it = std::partition_point(values_.begin() + static_cast<std::ptrdiff_t>(start),
                                   values_.end(), [&](const T& v) { return v > upper; });
    if (need == 1) {
      lo_.clear();
      hi_.clear();
      pos_.clear();
      for (; it != values_.end(); ++it) {
        if (remaining - *it > *it * rest + slack_) break;
        lo_.push_back(T(remaining - *it - slack_));
        hi_.push_back(T(remaining - *it + slack_));
        pos_.push_back(static_cast<std::uint32_t>(it - values_.begin()));
      }
      return index_.any_in(lo_, hi_, [&](std::size_t q, const auto& m) {
        if (!pair_after(m, pos_[q] + 1)) return false;
        chosen_.push_back(ids_[pos_[q]]);
        chosen_.push_back(m.a);
        chosen_.push_back(m.b);
        return true;
      });
    }
    for (; it != values_.end(); ++it) {
      const T& v = *it;
      if (remaining - v > v * rest + slack_) break;
      const auto p = static_cast<std::size_t>(it - values_.begin());
      chosen_.push_back(ids_[p]);
      if (extend(p + 1, need - 1, T(remaining - v))) return true;
      chosen_.pop_back();
    }
    return false;
  }

  std::span<const T> values_;
  std::span<const std::uint32_t> ids_;
  PairSumIndex<T>& index_;
  std::vector<std::uint32_t>& slot_;
  T slack_;
  std::vector<std::uint32_t> chosen_;
  std::vector<T> lo_;
  std::vector<T> hi_;
  std::vector<std::uint32_t> pos_;
};

}  // namespace detail

enum class SubsetSearch {
  /// Enumerate until a second matching subset is found; ambiguity aborts.
  exhaustive,
  /// Accept the first matching subset in order of size; the final
  /// self-verification of recover remains the soundness guard.
  first_match,
};

inline std::string_view to_string(SubsetSearch s) noexcept {
  return s == SubsetSearch::exhaustive ? "exhaustive" : "first-match";
}

inline SubsetSearch parse_subset_search(std::string_view s) {
  if (s == "exhaustive") return SubsetSearch::exhaustive;
  if (s == "first-match") return SubsetSearch::first_match;
  throw Error(ErrorKind::parse, "unknown subset search '" + std::string(s) + "'");
}

struct CoreOptions {
  Tolerance tolerance{};
  SubsetSearch search = SubsetSearch::exhaustive;
  /// first_match keeps all pair sums in memory only up to this many pairs.
  std::size_t pair_index_cap = std::size_t{1} << 22;
};

template <Scalar T>
struct CoreResult {
  /// p_1..p_K in discovery order (ascending).
  std::vector<T> values;
  /// A_k: 0-based indices of the value groups containing p_k.
  std::vector<std::vector<std::size_t>> membership;
  std::optional<AbortCertificate> abort;
  /// False when some subset match was accepted without ruling out a second one.
  bool ambiguity_checked = true;

  bool ok() const { return !abort.has_value(); }
};

/// Scans the groups in ascending order. A group whose value is a subset sum
/// of the values found so far joins the membership set of every value in the
/// subset; otherwise it introduces a new value. In exhaustive mode a second
/// matching subset violates the distinct-subset-sum assumption and aborts.
template <Scalar T, class Candidates = AnySubset>
CoreResult<T> sparsest_fit_core(std::span<const ValueGroup<T>> groups,
                                const CoreOptions& opt = {}, Candidates policy = {}) {
  CoreResult<T> out;
  std::vector<std::uint32_t> candidates;
  std::vector<T> pool;
  std::vector<std::uint32_t> pool_ids;
  detail::PairSumIndex<T> pairs;
  std::vector<std::uint32_t> slots;
  bool use_index = opt.search == SubsetSearch::first_match;
  for (std::size_t l = 0; l < groups.size(); ++l) {
    const auto& g = groups[l];
    if (!ScalarTraits<T>::is_positive(g.value) ||
        (l > 0 && !(groups[l - 1].value < g.value))) {
      out.abort = AbortCertificate{"input", "values must be positive and strictly ascending", l + 1};
      return out;
    }
    const T slack = detail::match_slack(g.value, opt.tolerance);
    policy.candidates(g, out.values.size(), candidates);
    // candidates ascend in value (values are discovered in ascending order)
    pool.clear();
    pool_ids.clear();
    for (std::size_t t = candidates.size(); t-- > 0;) {
      if (out.values[candidates[t]] > g.value + slack) continue;
      pool.push_back(out.values[candidates[t]]);
      pool_ids.push_back(candidates[t]);
    }

    std::vector<std::vector<std::uint32_t>> subsets;
    if (use_index) {
      detail::FirstMatchSearch<T> search(pool, pool_ids, pairs, slots, slack);
      if (auto hit = search.find(g.value)) subsets.push_back(std::move(*hit));
      out.ambiguity_checked = false;
    } else {
      detail::SubsetSumSearch<T> search(pool, slack);
      subsets = search.find(g.value, opt.search == SubsetSearch::exhaustive ? 2 : 1);
      for (auto& s : subsets) {
        for (auto& pos : s) pos = pool_ids[pos];
      }
      if (opt.search != SubsetSearch::exhaustive) out.ambiguity_checked = false;
    }
    for (auto& s : subsets) std::sort(s.begin(), s.end());
    if (subsets.size() >= 2) {
      out.abort = AbortCertificate{
          "subset-sum",
          "value " + format_scalar(g.value) + " is the sum of two distinct subsets " +
              detail::format_members(subsets[0]) + " and " + detail::format_members(subsets[1]),
          l + 1};
      return out;
    }
    if (subsets.size() == 1) {
      for (std::uint32_t k : subsets[0]) out.membership[k].push_back(l);
      policy.assign(g, std::span<const std::uint32_t>(subsets[0]));
    } else {
      const auto k = static_cast<std::uint32_t>(out.values.size());
      out.values.push_back(g.value);
      out.membership.push_back({l});
      policy.assign(g, std::span<const std::uint32_t>(&k, 1));
      if (use_index) {
        if (pairs.size() + k > opt.pair_index_cap) {
          use_index = false;  // too many pairs; continue with plain depth-first search
          pairs = {};
        } else {
          slots.push_back(0);
          pairs.add(k, out.values);
        }
      }
    }
  }
  return out;
}

template <Scalar T, class Candidates = AnySubset>
CoreResult<T> sparsest_fit_core(const std::vector<ValueGroup<T>>& groups,
                                const CoreOptions& opt = {}, Candidates policy = {}) {
  return sparsest_fit_core(std::span<const ValueGroup<T>>(groups), opt, std::move(policy));
}

// ---------------------------------------------------------------------------
// Reconstruction

/// Inverts the matching encoding: given one edge (i, j) per column, finds the
/// unique σ with σ(t_j) = t_i for every edge.
inline Permutation reconstruct_permutation(std::span<const CellRef> edges,
                                           const PartitionIndexer& indexer) {
  const std::uint32_t d = indexer.size();
  const std::uint32_t n = indexer.n();
  const auto fail = [](const std::string& why) {
    return Error(ErrorKind::malformed, "malformed membership: " + why);
  };
  if (edges.size() != d) {
    throw fail(std::to_string(edges.size()) + " edges for " + std::to_string(d) + " columns");
  }
  std::vector<bool> col_seen(d, false);
  std::vector<bool> row_seen(d, false);
  for (const auto& e : edges) {
    if (e.row >= d || e.col >= d) throw fail("edge index out of range");
    if (col_seen[e.col]) throw fail("column " + std::to_string(e.col + 1) + " used twice");
    if (row_seen[e.row]) throw fail("row " + std::to_string(e.row + 1) + " used twice");
    col_seen[e.col] = row_seen[e.row] = true;
  }

  const auto slot_blocks = indexer.slot_blocks();
  const std::size_t m = slot_blocks.size();
  // slots of block b occupy [block_begin[b], block_begin[b + 1]) in every tail
  std::vector<std::size_t> block_begin(indexer.shape().rows() + 1, 0);
  for (std::size_t b = 1; b < indexer.shape().rows(); ++b) {
    block_begin[b + 1] = block_begin[b] + indexer.shape().part(b);
  }

  // Elements sent to a non-first block: σ(x) lies in the same block of t_i.
  std::vector<std::vector<std::uint32_t>> candidates(n);
  std::vector<bool> constrained(n, false);
  std::vector<std::uint32_t> scratch;
  for (const auto& e : edges) {
    const auto from = indexer.tail(e.col);
    const auto to = indexer.tail(e.row);
    for (std::size_t s = 0; s < m; ++s) {
      const std::uint32_t x = from[s];
      const std::uint16_t b = slot_blocks[s];
      const auto block = to.subspan(block_begin[b], block_begin[b + 1] - block_begin[b]);
      if (!constrained[x]) {
        candidates[x].assign(block.begin(), block.end());
        constrained[x] = true;
      } else {
        scratch.clear();
        std::set_intersection(candidates[x].begin(), candidates[x].end(), block.begin(),
                              block.end(), std::back_inserter(scratch));
        candidates[x].swap(scratch);
      }
    }
  }

  const auto block_in = [&](std::uint32_t index, std::uint32_t y) -> std::uint16_t {
    const auto t = indexer.tail(index);
    for (std::size_t s = 0; s < m; ++s) {
      if (t[s] == y) return slot_blocks[s];
    }
    return 0;
  };
  std::vector<std::uint32_t> image(n);
  std::vector<bool> taken(n, false);
  for (std::uint32_t x = 0; x < n; ++x) {
    if (!constrained[x]) throw fail("element " + std::to_string(x + 1) + " is unconstrained");
    auto& cand = candidates[x];
    if (cand.size() > 1) {
      // Apply the first-block constraints as well.
      std::erase_if(cand, [&](std::uint32_t y) {
        for (const auto& e : edges) {
          if (block_in(e.row, y) != block_in(e.col, x)) return true;
        }
        return false;
      });
    }
    if (cand.size() != 1) {
      throw fail("element " + std::to_string(x + 1) + " has " + std::to_string(cand.size()) +
                 " candidate images");
    }
    if (taken[cand[0]]) throw fail("images do not form a bijection");
    taken[cand[0]] = true;
    image[x] = cand[0];
  }
  Permutation sigma(std::move(image));
  for (const auto& e : edges) {
    if (indexer.image(sigma, e.col) != e.row) {
      throw fail("reconstructed permutation disagrees with edge (" + std::to_string(e.row + 1) +
                 "," + std::to_string(e.col + 1) + ")");
    }
  }
  return sigma;
}

inline Permutation reconstruct_permutation(const std::vector<CellRef>& edges,
                                           const PartitionIndexer& indexer) {
  return reconstruct_permutation(std::span<const CellRef>(edges), indexer);
}

// ---------------------------------------------------------------------------
// Full pipeline

struct RecoveryOptions {
  Tolerance tolerance{};
  std::uint64_t cap = kDefaultDLambdaCap;
  /// Restrict subset candidates with the row/column exclusivity of matchings.
  bool matching_exclusion = true;
  SubsetSearch search = SubsetSearch::exhaustive;
  std::size_t pair_index_cap = std::size_t{1} << 22;
};

template <Scalar T>
struct RecoveredComponent {
  T value;
  /// 1-based positions of this value's cells among the ascending value groups.
  std::vector<std::size_t> membership;
  Permutation sigma;
};

template <Scalar T>
struct RecoveryResult {
  std::vector<RecoveredComponent<T>> components;
  SparseSupportFunction<T> function;
  std::optional<AbortCertificate> certificate;
  std::size_t group_count = 0;
  bool ambiguity_checked = true;

  bool recovered() const { return !certificate.has_value(); }
};

template <Scalar T>
RecoveryResult<T> recover(const MarginalMatrix<T>& m, const PartitionIndexer& indexer,
                          const RecoveryOptions& opt = {}) {
  RecoveryResult<T> result;
  const auto abort = [&](std::string stage, std::string detail,
                         std::optional<std::size_t> index = std::nullopt) {
    result.components.clear();
    result.function = {};
    result.certificate = AbortCertificate{std::move(stage), std::move(detail), index};
    return result;
  };
  if (!(m.shape() == indexer.shape())) {
    return abort("input", "marginal shape differs from indexer shape");
  }
  const auto groups = build_value_groups(m, opt.tolerance);
  result.group_count = groups.size();
  const CoreOptions core_opt{opt.tolerance, opt.search, opt.pair_index_cap};
  const std::span<const ValueGroup<T>> view(groups);
  const CoreResult<T> core =
      opt.matching_exclusion ? sparsest_fit_core(view, core_opt, MatchingExclusion(indexer.size()))
                             : sparsest_fit_core(view, core_opt, AnySubset{});
  result.ambiguity_checked = core.ambiguity_checked;
  if (!core.ok()) return abort(core.abort->stage, core.abort->detail, core.abort->value_index);

  std::vector<SupportEntry<T>> entries;
  std::vector<CellRef> edges;
  for (std::size_t k = 0; k < core.values.size(); ++k) {
    edges.clear();
    for (std::size_t l : core.membership[k]) {
      edges.insert(edges.end(), groups[l].cells.begin(), groups[l].cells.end());
    }
    try {
      Permutation sigma = reconstruct_permutation(edges, indexer);
      RecoveredComponent<T> comp{core.values[k], {}, sigma};
      for (std::size_t l : core.membership[k]) comp.membership.push_back(l + 1);
      result.components.push_back(std::move(comp));
      entries.push_back({std::move(sigma), core.values[k]});
    } catch (const Error& e) {
      return abort("reconstruct", "value p" + std::to_string(k + 1) + " = " +
                                      format_scalar(core.values[k]) + ": " + e.what(),
                   core.membership[k].front() + 1);
    }
  }
  result.function = SparseSupportFunction<T>(m.n(), std::move(entries));
  if (!fourier_coefficient(result.function, indexer).equals(m, opt.tolerance)) {
    return abort("verify", "the decoded function does not reproduce the input marginal");
  }
  const auto witness = check_unique_witness(result.function, indexer);
  if (!witness.all_pass()) {
    return abort("witness", std::to_string(witness.failures()) +
                                " decoded permutation(s) have no unique witness cell");
  }
  return result;
}

template <Scalar T>
RecoveryResult<T> recover(const MarginalMatrix<T>& m, const RecoveryOptions& opt = {}) {
  return recover(m, PartitionIndexer(m.shape(), opt.cap), opt);
}

}  // namespace symsparse
