#pragma once

// The two value modes: exact rationals (GMP) and doubles compared under a
// tolerance. Algorithms are templates over the scalar type and reach the
// mode-specific behaviour through ScalarTraits.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

#include "symsparse/error.hpp"

namespace symsparse {

using Rational = mpq_class;

enum class ValueMode { exact, floating };

inline std::string_view to_string(ValueMode m) noexcept {
  return m == ValueMode::exact ? "exact" : "float";
}

inline ValueMode parse_value_mode(std::string_view s) {
  if (s == "exact") return ValueMode::exact;
  if (s == "float") return ValueMode::floating;
  throw Error(ErrorKind::parse, "unknown value mode '" + std::string(s) + "'");
}

/// Float-mode equality: |a-b| <= max(abs_tol, rel_tol * max(|a|,|b|)).
struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-9;

  double window(double magnitude) const noexcept {
    return std::max(abs_tol, rel_tol * std::abs(magnitude));
  }
};

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr ValueMode mode = ValueMode::exact;

  static bool equal(const Rational& a, const Rational& b, const Tolerance&) { return a == b; }
  static bool is_positive(const Rational& a) { return sgn(a) > 0; }
  static double to_double(const Rational& a) { return a.get_d(); }

  /// Accepts "12", "-0.25", "1.5e-3" and "p/q".
  static Rational parse(std::string_view s) {
    const auto bad = [&] {
      return Error(ErrorKind::parse, "not a decimal or rational literal: '" + std::string(s) + "'");
    };
    if (s.empty()) throw bad();
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
      Rational q;
      if (q.set_str(std::string(s), 10) != 0 || q.get_den() == 0) throw bad();
      q.canonicalize();
      return q;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    long scale = 0;
    bool any_digit = false;
    for (; pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])); ++pos) {
      digits.push_back(s[pos]);
      any_digit = true;
    }
    if (pos < s.size() && s[pos] == '.') {
      for (++pos; pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])); ++pos) {
        digits.push_back(s[pos]);
        --scale;
        any_digit = true;
      }
    }
    if (!any_digit) throw bad();
    if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
      long exponent = 0;
      const auto* first = s.data() + pos + 1;
      const auto* last = s.data() + s.size();
      if (first != last && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, exponent);
      if (ec != std::errc() || ptr != last) throw bad();
      if (exponent > 100000 || exponent < -100000) throw bad();
      scale += exponent;
      pos = s.size();
    }
    if (pos != s.size()) throw bad();
    mpz_class num(digits, 10);
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational q = scale >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }

  /// Finite decimals print as decimals; anything else as "p/q".
  static std::string format(const Rational& q) {
    mpz_class den = q.get_den();
    long twos = 0;
    long fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
      den /= 2;
      ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
      den /= 5;
      ++fives;
    }
    if (den != 1) return q.get_str(10);
    const long scale = std::max(twos, fives);
    if (scale == 0) return q.get_num().get_str(10);
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale));
    mpz_class scaled = q.get_num() * ten_pow / q.get_den();
    const bool negative = sgn(scaled) < 0;
    if (negative) scaled = -scaled;
    std::string digits = scaled.get_str(10);
    if (digits.size() <= static_cast<std::size_t>(scale)) {
      digits.insert(0, static_cast<std::size_t>(scale) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
    return negative ? "-" + digits : digits;
  }

  static Rational zero() { return Rational(0); }
};

template <>
struct ScalarTraits<double> {
  static constexpr ValueMode mode = ValueMode::floating;

  static bool equal(double a, double b, const Tolerance& tol) {
    return std::abs(a - b) <= tol.window(std::max(std::abs(a), std::abs(b)));
  }
  static bool is_positive(double a) { return a > 0.0; }
  static double to_double(double a) { return a; }

  static double parse(std::string_view s) {
    if (s.find('/') != std::string_view::npos) {
      return ScalarTraits<Rational>::parse(s).get_d();
    }
    double v = 0;
    const auto* first = s.data();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::parse, "not a finite decimal literal: '" + std::string(s) + "'");
    }
    return v;
  }

  /// Shortest representation that parses back to the same double.
  static std::string format(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  }

  static double zero() { return 0.0; }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::mode; };

template <Scalar T>
bool scalar_equal(const T& a, const T& b, const Tolerance& tol = {}) {
  return ScalarTraits<T>::equal(a, b, tol);
}

template <Scalar T>
T parse_scalar(std::string_view s) {
  return ScalarTraits<T>::parse(s);
}

template <Scalar T>
std::string format_scalar(const T& v) {
  return ScalarTraits<T>::format(v);
}

}  // namespace symsparse
