#pragma once

// Sparse non-negative functions on S_n and their λ-partial information
// f̂(λ) = Σ_σ f(σ) M^λ(σ), stored as a sparse cell map.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "symsparse/error.hpp"
#include "symsparse/scalar.hpp"
#include "symsparse/symgroup.hpp"

namespace symsparse {

template <Scalar T>
struct SupportEntry {
  Permutation perm;
  T value;
};

/// f as a list of (σ_k, p_k) with p_k > 0. Repeated permutations are merged
/// by summing their values; merged_duplicates() reports how many were folded.
template <Scalar T>
class SparseSupportFunction {
 public:
  SparseSupportFunction() = default;

  SparseSupportFunction(std::size_t n, std::vector<SupportEntry<T>> entries) : n_(n) {
    std::map<Permutation, std::size_t> position;
    for (auto& e : entries) {
      require(e.perm.size() == n, ErrorKind::size_mismatch,
              "support permutation of size " + std::to_string(e.perm.size()) +
                  " in a function on S_" + std::to_string(n));
      require(ScalarTraits<T>::is_positive(e.value), ErrorKind::precondition,
              "function values must be strictly positive");
      auto [it, inserted] = position.emplace(e.perm, entries_.size());
      if (inserted) {
        entries_.push_back(std::move(e));
      } else {
        entries_[it->second].value += e.value;
        ++merged_;
      }
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t sparsity() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<SupportEntry<T>>& entries() const noexcept { return entries_; }
  const SupportEntry<T>& operator[](std::size_t k) const noexcept { return entries_[k]; }
  std::size_t merged_duplicates() const noexcept { return merged_; }

  T l1_norm() const {
    T total = ScalarTraits<T>::zero();
    for (const auto& e : entries_) total += e.value;
    return total;
  }

  std::optional<T> value_of(const Permutation& sigma) const {
    for (const auto& e : entries_) {
      if (e.perm == sigma) return e.value;
    }
    return std::nullopt;
  }

  /// Same support and values (exact, or within tolerance in float mode),
  /// irrespective of entry order.
  bool same_as(const SparseSupportFunction& other, const Tolerance& tol = {}) const {
    if (n_ != other.n_ || entries_.size() != other.entries_.size()) return false;
    std::map<Permutation, const T*> theirs;
    for (const auto& e : other.entries_) theirs.emplace(e.perm, &e.value);
    for (const auto& e : entries_) {
      const auto it = theirs.find(e.perm);
      if (it == theirs.end() || !scalar_equal(e.value, *it->second, tol)) return false;
    }
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<SupportEntry<T>> entries_;
  std::size_t merged_ = 0;
};

template <Scalar T>
struct Cell {
  std::uint32_t row;
  std::uint32_t col;
  T value;
};

/// Sparse D_λ×D_λ matrix holding only strictly positive cells, sorted by (row, col).
template <Scalar T>
class MarginalMatrix {
 public:
  MarginalMatrix() = default;

  MarginalMatrix(LambdaShape shape, std::vector<Cell<T>> cells)
      : shape_(std::move(shape)), cells_(std::move(cells)) {
    require(shape_.d_lambda() <= 0xffffffffu, ErrorKind::cap_exceeded,
            "marginal dimension must fit in 32 bits");
    const auto d = static_cast<std::uint64_t>(shape_.d_lambda());
    std::sort(cells_.begin(), cells_.end(), [](const Cell<T>& a, const Cell<T>& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const auto& cell = cells_[c];
      require(cell.row < d && cell.col < d, ErrorKind::out_of_range,
              "cell index outside 1.." + std::to_string(d));
      require(ScalarTraits<T>::is_positive(cell.value), ErrorKind::malformed,
              "stored marginal cells must be strictly positive");
      require(c == 0 || cells_[c - 1].row != cell.row || cells_[c - 1].col != cell.col,
              ErrorKind::malformed, "duplicate marginal cell");
    }
  }

  const LambdaShape& shape() const noexcept { return shape_; }
  std::uint32_t n() const noexcept { return shape_.n(); }
  std::uint32_t dimension() const { return static_cast<std::uint32_t>(shape_.d_lambda()); }
  const std::vector<Cell<T>>& cells() const noexcept { return cells_; }
  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

  const T* find(std::uint32_t row, std::uint32_t col) const {
    const auto it = std::lower_bound(
        cells_.begin(), cells_.end(), std::pair{row, col}, [](const Cell<T>& c, const auto& key) {
          return std::tie(c.row, c.col) < std::tie(key.first, key.second);
        });
    if (it == cells_.end() || it->row != row || it->col != col) return nullptr;
    return &it->value;
  }

  T total() const {
    T sum = ScalarTraits<T>::zero();
    for (const auto& c : cells_) sum += c.value;
    return sum;
  }

  bool equals(const MarginalMatrix& other, const Tolerance& tol = {}) const {
    if (!(shape_ == other.shape_) || cells_.size() != other.cells_.size()) return false;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      const auto& a = cells_[c];
      const auto& b = other.cells_[c];
      if (a.row != b.row || a.col != b.col || !scalar_equal(a.value, b.value, tol)) return false;
    }
    return true;
  }

 private:
  LambdaShape shape_;
  std::vector<Cell<T>> cells_;
};

/// f̂(λ): each support permutation adds p_k to the D_λ cells of its induced
/// matching. Values in one cell are summed in support order, so the result is
/// bit-reproducible in float mode.
template <Scalar T>
MarginalMatrix<T> fourier_coefficient(const SparseSupportFunction<T>& f,
                                      const PartitionIndexer& indexer) {
  require(f.empty() || f.n() == indexer.n(), ErrorKind::size_mismatch,
          "function on S_" + std::to_string(f.n()) + " with shape of total " +
              std::to_string(indexer.n()));
  struct Edge {
    std::uint32_t row, col, k;
  };
  const std::uint32_t d = indexer.size();
  std::vector<Edge> edges;
  edges.reserve(f.sparsity() * d);
  for (std::uint32_t k = 0; k < f.sparsity(); ++k) {
    const auto& sigma = f[k].perm;
    for (std::uint32_t j = 0; j < d; ++j) edges.push_back({indexer.image(sigma, j), j, k});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.row, a.col, a.k) < std::tie(b.row, b.col, b.k);
  });
  std::vector<Cell<T>> cells;
  for (std::size_t e = 0; e < edges.size();) {
    Cell<T> cell{edges[e].row, edges[e].col, f[edges[e].k].value};
    std::size_t next = e + 1;
    for (; next < edges.size() && edges[next].row == cell.row && edges[next].col == cell.col;
         ++next) {
      cell.value += f[edges[next].k].value;
    }
    cells.push_back(std::move(cell));
    e = next;
  }
  return MarginalMatrix<T>(indexer.shape(), std::move(cells));
}

template <Scalar T>
MarginalMatrix<T> fourier_coefficient(const SparseSupportFunction<T>& f, const LambdaShape& shape,
                                      std::uint64_t cap = kDefaultDLambdaCap) {
  return fourier_coefficient(f, PartitionIndexer(shape, cap));
}

template <Scalar T>
struct MarginalReport {
  bool ok = true;
  T total{};
  /// total / D_λ, the common value every row and column sum must take.
  T line_sum{};
  bool mass_ok = true;
  std::vector<std::uint32_t> bad_rows;
  std::vector<std::uint32_t> bad_cols;
};

/// Checks the structure every f̂(λ) has: all row and column sums equal
/// total / D_λ and, when given, total = D_λ · expected_mass.
template <Scalar T>
MarginalReport<T> verify_marginal(const MarginalMatrix<T>& m,
                                  const std::optional<T>& expected_mass = std::nullopt,
                                  const Tolerance& tol = {}) {
  MarginalReport<T> report;
  const std::uint32_t d = m.dimension();
  std::vector<T> rows(d, ScalarTraits<T>::zero());
  std::vector<T> cols(d, ScalarTraits<T>::zero());
  report.total = ScalarTraits<T>::zero();
  for (const auto& c : m.cells()) {
    rows[c.row] += c.value;
    cols[c.col] += c.value;
    report.total += c.value;
  }
  report.line_sum = report.total / T(d);
  for (std::uint32_t i = 0; i < d; ++i) {
    if (!scalar_equal(rows[i], report.line_sum, tol)) report.bad_rows.push_back(i);
    if (!scalar_equal(cols[i], report.line_sum, tol)) report.bad_cols.push_back(i);
  }
  if (expected_mass) {
    report.mass_ok = scalar_equal(report.total, T(*expected_mass * T(d)), tol);
  }
  report.ok = report.bad_rows.empty() && report.bad_cols.empty() && report.mass_ok;
  return report;
}

}  // namespace symsparse
