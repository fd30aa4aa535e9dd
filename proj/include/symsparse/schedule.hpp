#pragma once

// Arithmetic expressions for sweep schedules, e.g. "c*n*log(n)",
// "(c/m!)*n^m*log(n)" or "c*D*loglog(D)", and shape patterns such as "n-2,2".
//
// Grammar: + - * / ^ (right-associative), unary minus, postfix !, parentheses,
// numbers, variables, and the functions log (natural), loglog, log2, sqrt,
// exp, floor, ceil.

#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "symsparse/error.hpp"
#include "symsparse/symgroup.hpp"

namespace symsparse {

using Variables = std::map<std::string, double, std::less<>>;

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, const Variables& vars) : s_(text), vars_(vars) {}

  double run() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorKind::parse, "expression '" + std::string(s_) + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double sum() {
    double v = product();
    while (true) {
      if (eat('+')) {
        v += product();
      } else if (eat('-')) {
        v -= product();
      } else {
        return v;
      }
    }
  }
  double product() {
    double v = unary();
    while (true) {
      if (eat('*')) {
        v *= unary();
      } else if (eat('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  double power() {
    const double base = postfix();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double postfix() {
    double v = primary();
    while (eat('!')) {
      if (v < 0 || v > 170 || v != std::floor(v)) fail("factorial needs an integer in 0..170");
      v = std::tgamma(v + 1);
    }
    return v;
  }
  double primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const std::string rest(s_.substr(pos_));
      double v = 0;
      try {
        v = std::stod(rest, &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = s_.substr(start, pos_ - start);
      if (eat('(')) {
        const double arg = sum();
        if (!eat(')')) fail("missing ')' after " + std::string(name) + " argument");
        return call(name, arg);
      }
      const auto it = vars_.find(name);
      if (it == vars_.end()) fail("unknown variable '" + std::string(name) + "'");
      return it->second;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  double call(std::string_view f, double x) const {
    if (f == "log" || f == "ln") return std::log(x);
    if (f == "loglog") return std::log(std::log(x));
    if (f == "log2") return std::log2(x);
    if (f == "sqrt") return std::sqrt(x);
    if (f == "exp") return std::exp(x);
    if (f == "floor") return std::floor(x);
    if (f == "ceil") return std::ceil(x);
    fail("unknown function '" + std::string(f) + "'");
  }

  std::string_view s_;
  const Variables& vars_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline double evaluate_expression(std::string_view text, const Variables& vars) {
  return detail::ExpressionParser(text, vars).run();
}

/// Whether `name` occurs in the expression as a variable (not a function).
inline bool references_variable(std::string_view text, std::string_view name) {
  const auto is = [&](std::size_t p, auto pred) {
    return p < text.size() && pred(static_cast<unsigned char>(text[p]));
  };
  const auto word = [](int ch) { return std::isalnum(ch) || ch == '_'; };
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (is(pos, [](int ch) { return std::isdigit(ch) || ch == '.'; })) {
      // a number, exponent included, so the "e" of 1e5 is not an identifier
      while (is(pos, [](int ch) { return std::isdigit(ch) || ch == '.'; })) ++pos;
      if (is(pos, [](int ch) { return ch == 'e' || ch == 'E'; })) {
        ++pos;
        if (is(pos, [](int ch) { return ch == '+' || ch == '-'; })) ++pos;
        while (is(pos, [](int ch) { return std::isdigit(ch); })) ++pos;
      }
    } else if (is(pos, [](int ch) { return std::isalpha(ch) || ch == '_'; })) {
      const std::size_t start = pos;
      while (is(pos, word)) ++pos;
      std::size_t next = pos;
      while (is(next, [](int ch) { return std::isspace(ch); })) ++next;
      if (text.substr(start, pos - start) == name && !(next < text.size() && text[next] == '(')) {
        return true;
      }
    } else {
      ++pos;
    }
  }
  return false;
}

/// Variables available to a K-schedule at one grid point: n, D (= D_λ),
/// m (= n - λ1), r (number of parts) and c.
inline Variables schedule_variables(const LambdaShape& shape, double c) {
  return {{"n", static_cast<double>(shape.n())},
          {"D", shape.dimension_is_exact() ? static_cast<double>(shape.d_lambda()) : std::exp(shape.log_d_lambda())},
          {"m", static_cast<double>(shape.tail_size())},
          {"r", static_cast<double>(shape.rows())},
          {"c", c}};
}

/// floor of the schedule value; schedules must give K ≥ 1.
inline std::uint64_t evaluate_schedule(std::string_view expr, const LambdaShape& shape, double c) {
  const double v = evaluate_expression(expr, schedule_variables(shape, c));
  if (!std::isfinite(v) || v < 1.0 || v > 1e15) {
    throw Error(ErrorKind::precondition, "schedule '" + std::string(expr) + "' gives K = " +
                                             std::to_string(v) + " at shape " + shape.to_string());
  }
  return static_cast<std::uint64_t>(std::floor(v));
}

/// A comma-separated list of part expressions in n, e.g. "n-1,1" or "38,2".
inline LambdaShape shape_from_pattern(std::string_view pattern, std::uint32_t n) {
  std::string text(pattern);
  std::erase_if(text, [](char ch) { return ch == '[' || ch == ']'; });
  std::vector<std::uint32_t> parts;
  const Variables vars{{"n", static_cast<double>(n)}};
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const double v = evaluate_expression(std::string_view(text).substr(start, comma - start), vars);
    if (v < 1 || v != std::floor(v) || v > 1e9) {
      throw Error(ErrorKind::parse, "shape part '" + text.substr(start, comma - start) +
                                        "' is not a positive integer at n = " + std::to_string(n));
    }
    parts.push_back(static_cast<std::uint32_t>(v));
    start = comma + 1;
  }
  auto shape = LambdaShape::from_parts(std::move(parts));
  require(shape.n() == n, ErrorKind::precondition,
          "shape pattern '" + std::string(pattern) + "' does not sum to n = " + std::to_string(n));
  return shape;
}

}  // namespace symsparse
