#pragma once

// Deliberately naive reference implementations used as test oracles. Nothing
// here shares code with the library beyond the value types.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "symsparse/marginals.hpp"

namespace brute {

using Word = std::vector<int>;

/// All block-assignment words of a shape, lexicographically ordered.
inline std::vector<Word> partitions(const std::vector<std::uint32_t>& parts) {
  Word w;
  for (std::size_t b = 0; b < parts.size(); ++b) w.insert(w.end(), parts[b], static_cast<int>(b));
  std::vector<Word> out;
  do {
    out.push_back(w);
  } while (std::next_permutation(w.begin(), w.end()));
  return out;
}

inline std::size_t index_of(const std::vector<Word>& all, const Word& w) {
  return static_cast<std::size_t>(std::find(all.begin(), all.end(), w) - all.begin());
}

/// Element x lands in block t[x]; σ moves it to σ(x).
inline Word act(std::span<const std::uint32_t> sigma, const Word& t) {
  Word out(t.size());
  for (std::size_t x = 0; x < t.size(); ++x) out[sigma[x]] = t[x];
  return out;
}

/// Dense D×D matrix M[i][j] = Σ_σ f(σ)·[σ(t_j) = t_i].
template <class T>
std::vector<std::vector<T>> marginal(const symsparse::SparseSupportFunction<T>& f,
                                     const std::vector<std::uint32_t>& parts) {
  const auto all = partitions(parts);
  std::vector<std::vector<T>> m(all.size(), std::vector<T>(all.size(), T(0)));
  for (const auto& e : f.entries()) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      m[index_of(all, act(e.perm.images(), all[j]))][j] += e.value;
    }
  }
  return m;
}

/// Per permutation: does some cell of its matching belong to no other?
inline std::vector<bool> unique_witness(const std::vector<std::vector<std::uint32_t>>& perms,
                                        const std::vector<std::uint32_t>& parts) {
  const auto all = partitions(parts);
  std::map<std::pair<std::size_t, std::size_t>, int> count;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cells(perms.size());
  for (std::size_t k = 0; k < perms.size(); ++k) {
    for (std::size_t j = 0; j < all.size(); ++j) {
      cells[k].push_back({index_of(all, act(perms[k], all[j])), j});
      ++count[cells[k].back()];
    }
  }
  std::vector<bool> out;
  for (const auto& c : cells) {
    out.push_back(std::any_of(c.begin(), c.end(), [&](const auto& x) { return count[x] == 1; }));
  }
  return out;
}

/// Whether a non-zero c ∈ {-K..K}^K has Σ c_k v_k = 0.
inline bool dependent(const std::vector<long>& v) {
  const long K = static_cast<long>(v.size());
  std::vector<long> c(v.size(), -K);
  while (true) {
    long s = 0;
    bool nonzero = false;
    for (std::size_t k = 0; k < v.size(); ++k) {
      s += c[k] * v[k];
      nonzero |= c[k] != 0;
    }
    if (nonzero && s == 0) return true;
    std::size_t k = 0;
    while (k < c.size() && c[k] == K) c[k++] = -K;
    if (k == c.size()) return false;
    ++c[k];
  }
}

inline std::vector<std::vector<std::uint32_t>> all_perms(std::size_t n) {
  std::vector<std::uint32_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
  std::vector<std::vector<std::uint32_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace brute
