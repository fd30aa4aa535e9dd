#pragma once

// Closed-form threshold calculators: the entropy profile of a shape, the
// recoverability exponent γ(α), the achievable sparsity for the first-order,
// fixed-tail, near-hook and general regimes, and the information-theoretic
// converse. Logarithms are natural throughout.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "symsparse/error.hpp"
#include "symsparse/scalar.hpp"
#include "symsparse/symgroup.hpp"

namespace symsparse {

/// α_i = λ_i / n, exact, plus the entropies of the full and tail profiles.
struct AlphaProfile {
  std::vector<Rational> alpha;
  double H = 0;
  double H_tail = 0;
};

namespace detail {

inline double xlogx_neg(double a) { return a > 0 ? -a * std::log(a) : 0.0; }

inline double log_d_lambda(const LambdaShape& shape) { return shape.log_d_lambda(); }

}  // namespace detail

inline AlphaProfile alpha_profile(const LambdaShape& shape) {
  AlphaProfile out;
  const double n = shape.n();
  for (std::size_t i = 0; i < shape.rows(); ++i) {
    const auto p = shape.part(i);
    out.alpha.emplace_back(Rational(p, shape.n()));
    out.alpha.back().canonicalize();
    const double h = detail::xlogx_neg(p / n);
    out.H += h;
    if (i > 0) out.H_tail += h;
  }
  return out;
}

struct Entropies {
  double H;
  double H_tail;
};

inline Entropies entropies(const LambdaShape& shape) {
  require(shape.rows() >= 2, ErrorKind::precondition,
          "entropies need at least two parts, got " + shape.to_string());
  const auto a = alpha_profile(shape);
  return {a.H, a.H_tail};
}

struct GammaExponent {
  double gamma;
  std::uint64_t M;
};

/// M = ⌊1/(1-α1)⌋ = ⌊n/(n-λ1)⌋.
inline std::uint64_t m_floor(const LambdaShape& shape) {
  require(shape.rows() >= 2, ErrorKind::precondition, "α1 must be below 1");
  return shape.n() / (shape.n() - shape.part(0));
}

inline GammaExponent gamma_exponent(const LambdaShape& shape, double c_prime = 1.0) {
  const auto e = entropies(shape);
  const std::uint64_t M = m_floor(shape);
  const double ratio = static_cast<double>(M) / static_cast<double>(M + 1);
  return {ratio * (1.0 - c_prime * (e.H - e.H_tail) / e.H), M};
}

enum class LimitFamily { alpha1_to_1, alpha1_to_0 };

inline std::string_view to_string(LimitFamily f) noexcept {
  return f == LimitFamily::alpha1_to_1 ? "alpha1-to-1" : "alpha1-to-0";
}

inline LimitFamily parse_limit_family(std::string_view s) {
  if (s == "alpha1-to-1") return LimitFamily::alpha1_to_1;
  if (s == "alpha1-to-0") return LimitFamily::alpha1_to_0;
  throw Error(ErrorKind::parse, "unknown limit family '" + std::string(s) + "'");
}

struct EntropyRatioRow {
  std::uint64_t n;
  double H;
  double H_tail;
  double ratio;
};

struct EntropyRatioTable {
  LimitFamily family;
  std::vector<EntropyRatioRow> rows;
  /// Strictly increasing ratios along the supplied points.
  bool monotone = true;
};

/// Evaluates H'/H on (n-1, 1) or (1, …, 1) at each n, in closed form so that
/// n may be far beyond anything a LambdaShape could hold.
inline EntropyRatioTable entropy_ratio_check(LimitFamily family, const std::vector<std::uint64_t>& points) {
  EntropyRatioTable out{family, {}, true};
  for (std::uint64_t n : points) {
    require(n >= 2, ErrorKind::precondition, "family points need n >= 2");
    const double x = static_cast<double>(n);
    double H = 0;
    double tail = 0;
    if (family == LimitFamily::alpha1_to_1) {
      tail = std::log(x) / x;
      H = detail::xlogx_neg((x - 1) / x) + tail;
    } else {
      H = std::log(x);
      tail = (x - 1) / x * std::log(x);
    }
    const double ratio = tail / H;
    if (!out.rows.empty() && !(ratio > out.rows.back().ratio)) out.monotone = false;
    out.rows.push_back({n, H, tail, ratio});
  }
  return out;
}

/// constant · x · ln(max(x, T)), x = D_λ² / (n ln n).
inline double converse_bound(const LambdaShape& shape, double T, double constant = 3.0) {
  const double logd = detail::log_d_lambda(shape);
  const double n = shape.n();
  require(shape.n() >= 2 && logd >= std::log(n) - 1e-12, ErrorKind::precondition,
          "the converse bound needs D_λ >= n");
  require(T >= 1, ErrorKind::precondition, "T must be at least 1");
  const double x = std::exp(2 * logd - std::log(n) - std::log(std::log(n)));
  return constant * x * std::log(std::max(x, T));
}

enum class ThresholdCase { first_order, fixed_tail, near_hook, general };

inline std::string_view to_string(ThresholdCase c) noexcept {
  switch (c) {
    case ThresholdCase::first_order: return "first-order";
    case ThresholdCase::fixed_tail: return "fixed-tail";
    case ThresholdCase::near_hook: return "near-hook";
    case ThresholdCase::general: return "general";
  }
  return "?";
}

struct ThresholdOptions {
  double epsilon = 0.5;
  /// Largest m treated as a constant tail for shapes (n-m, m).
  std::uint32_t small_m_cap = 4;
  double C = 1.0;
  double C_prime = 1.0;
};

struct AchievableThreshold {
  ThresholdCase tag;
  double K;
};

inline AchievableThreshold achievable_threshold(const LambdaShape& shape,
                                                const ThresholdOptions& opt = {}) {
  require(opt.epsilon > 0 && opt.epsilon < 1, ErrorKind::precondition,
          "epsilon must lie in (0, 1)");
  require(shape.rows() >= 2, ErrorKind::precondition, "shape must have at least two parts");
  const double n = shape.n();
  const double ln_n = std::log(n);
  const double logd = detail::log_d_lambda(shape);
  const std::uint32_t m = shape.tail_size();
  if (shape.rows() == 2 && m == 1) {
    return {ThresholdCase::first_order, std::floor((1 - opt.epsilon) * n * ln_n)};
  }
  if (shape.rows() == 2 && m <= opt.small_m_cap) {
    const double value = (1 - opt.epsilon) / std::tgamma(m + 1.0) * std::pow(n, m) * ln_n;
    return {ThresholdCase::fixed_tail, std::floor(value)};
  }
  if (static_cast<double>(shape.part(0)) >= n - std::pow(n, 2.0 / 9.0)) {
    return {ThresholdCase::near_hook, std::floor((1 - opt.epsilon) * std::exp(logd) * std::log(logd))};
  }
  const double gamma = gamma_exponent(shape, opt.C_prime).gamma;
  return {ThresholdCase::general, std::floor(opt.C * std::exp(gamma * logd))};
}

struct ThresholdReport {
  std::string shape;
  std::uint32_t n = 0;
  double log_d_lambda = 0;
  ThresholdCase tag = ThresholdCase::general;
  double epsilon = 0;
  double C = 1;
  double C_prime = 1;
  double K_achievable = 0;
  double gamma = 0;
  std::uint64_t M_floor = 0;
  double H = 0;
  double H_tail = 0;
  double T = 1;
  double converse_constant = 3;
  double K_converse = 0;
};

inline ThresholdReport threshold_report(const LambdaShape& shape, const ThresholdOptions& opt,
                                        double T, double converse_constant = 3.0) {
  ThresholdReport r;
  r.shape = shape.to_string();
  r.n = shape.n();
  r.log_d_lambda = detail::log_d_lambda(shape);
  const auto a = achievable_threshold(shape, opt);
  r.tag = a.tag;
  r.K_achievable = a.K;
  r.epsilon = opt.epsilon;
  r.C = opt.C;
  r.C_prime = opt.C_prime;
  const auto g = gamma_exponent(shape, opt.C_prime);
  r.gamma = g.gamma;
  r.M_floor = g.M;
  const auto e = entropies(shape);
  r.H = e.H;
  r.H_tail = e.H_tail;
  r.T = T;
  r.converse_constant = converse_constant;
  r.K_converse = converse_bound(shape, T, converse_constant);
  return r;
}

}  // namespace symsparse
