#pragma once

// File formats. Values travel as decimal strings so rationals round-trip;
// permutations and matrix indices are 1-based on disk.
//
//   function:  {"n", "mode": "exact"|"float", "entries": [{"perm": [...], "value": "..."}]}
//   marginal:  {"n", "shape": [...], "cells": [[row, col, "value"], ...]}
//   sweep CSV: n,shape,K,schedule_tag,trials,successes,rate,seconds,seed

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "symsparse/analysis.hpp"
#include "symsparse/condition1.hpp"
#include "symsparse/marginals.hpp"
#include "symsparse/oracle.hpp"
#include "symsparse/randmodel.hpp"
#include "symsparse/sparsest_fit.hpp"

namespace symsparse::io {

using Json = nlohmann::ordered_json;
using AnyFunction = std::variant<SparseSupportFunction<double>, SparseSupportFunction<Rational>>;
using AnyMarginal = std::variant<MarginalMatrix<double>, MarginalMatrix<Rational>>;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::precondition, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::precondition, "cannot write '" + path + "'");
  out << text;
  require(out.good(), ErrorKind::precondition, "write to '" + path + "' failed");
}

inline Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, what + ": " + e.what());
  }
}

namespace detail {

inline bool flat(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (e.is_structured() && !flat(e)) return false;
  }
  return true;
}

inline void dump_into(std::string& out, const Json& j, int depth) {
  if (!j.is_structured() || j.empty() || flat(j)) {
    out += j.dump();
    return;
  }
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const bool object = j.is_object();
  out += object ? "{\n" : "[\n";
  bool first = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!first) out += ",\n";
    first = false;
    out += pad;
    if (object) out += Json(it.key()).dump() + ": ";
    dump_into(out, *it, depth + 1);
  }
  out += "\n" + std::string(pad.size() - 2, ' ') + (object ? "}" : "]");
}

}  // namespace detail

/// Indented JSON with arrays of scalars (and arrays of such) kept on one line.
inline std::string dump(const Json& j) {
  std::string out;
  detail::dump_into(out, j, 0);
  return out + "\n";
}

namespace detail {

template <class F>
auto field(const Json& j, const char* key, const std::string& what, F&& get) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::parse, what + ": missing \"" + key + "\"");
  }
  try {
    return get(j.at(key));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, what + ": bad \"" + key + "\": " + e.what());
  }
}

template <Scalar T>
T value_of(const Json& v, const std::string& what) {
  if (v.is_string()) return parse_scalar<T>(v.get<std::string>());
  if (v.is_number()) return parse_scalar<T>(v.dump());
  throw Error(ErrorKind::parse, what + ": values must be decimal strings");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// shapes and permutations

inline Json to_json(const LambdaShape& s) { return Json(s.parts()); }

inline LambdaShape shape_from_json(const Json& j) {
  try {
    return LambdaShape::from_parts(j.get<std::vector<std::uint32_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::parse, std::string("shape: ") + e.what());
  }
}

/// "3,1", "[3,1]" or "(3,1)".
inline LambdaShape parse_shape(std::string text) {
  std::erase_if(text, [](char c) { return c == '[' || c == ']' || c == '(' || c == ')' || c == ' '; });
  std::vector<std::uint32_t> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    require(!item.empty() && ec == std::errc() && ptr == item.data() + item.size(), ErrorKind::parse,
            "bad shape part '" + item + "'");
    parts.push_back(v);
  }
  return LambdaShape::from_parts(std::move(parts));
}

inline Json to_json(const Permutation& p) { return Json(p.one_based()); }

// ---------------------------------------------------------------------------
// functions

template <Scalar T>
Json to_json(const SparseSupportFunction<T>& f) {
  Json entries = Json::array();
  for (const auto& e : f.entries()) {
    entries.push_back({{"perm", to_json(e.perm)}, {"value", format_scalar(e.value)}});
  }
  return {{"n", f.n()}, {"mode", to_string(ScalarTraits<T>::mode)}, {"entries", std::move(entries)}};
}

inline Json to_json(const AnyFunction& f) {
  return std::visit([](const auto& g) { return to_json(g); }, f);
}

template <Scalar T>
SparseSupportFunction<T> function_as(const Json& j) {
  const std::string what = "function";
  const auto n = detail::field(j, "n", what, [](const Json& v) { return v.get<std::size_t>(); });
  std::vector<SupportEntry<T>> entries;
  const auto& list = detail::field(j, "entries", what, [](const Json& v) -> const Json& {
    if (!v.is_array()) throw Error(ErrorKind::parse, "function: \"entries\" must be an array");
    return v;
  });
  for (const auto& e : list) {
    const auto perm = detail::field(e, "perm", what, [](const Json& v) {
      return v.template get<std::vector<long>>();
    });
    const T value =
        detail::field(e, "value", what, [&](const Json& v) { return detail::value_of<T>(v, what); });
    entries.push_back({Permutation::from_one_based(perm), value});
  }
  return SparseSupportFunction<T>(n, std::move(entries));
}

inline ValueMode mode_of(const Json& j, ValueMode fallback) {
  if (!j.is_object() || !j.contains("mode")) return fallback;
  return parse_value_mode(detail::field(j, "mode", "function", [](const Json& v) {
    return v.get<std::string>();
  }));
}

inline AnyFunction function_from_json(const Json& j) {
  if (mode_of(j, ValueMode::exact) == ValueMode::exact) return function_as<Rational>(j);
  return function_as<double>(j);
}

inline AnyFunction load_function(const std::string& path) {
  return function_from_json(parse_json(read_text(path), path));
}

// ---------------------------------------------------------------------------
// marginals

template <Scalar T>
Json to_json(const MarginalMatrix<T>& m) {
  Json cells = Json::array();
  for (const auto& c : m.cells()) {
    cells.push_back(Json::array({c.row + 1, c.col + 1, format_scalar(c.value)}));
  }
  return {{"n", m.n()}, {"shape", to_json(m.shape())}, {"cells", std::move(cells)}};
}

inline Json to_json(const AnyMarginal& m) {
  return std::visit([](const auto& g) { return to_json(g); }, m);
}

template <Scalar T>
MarginalMatrix<T> marginal_as(const Json& j) {
  const std::string what = "marginal";
  const auto n = detail::field(j, "n", what, [](const Json& v) { return v.get<std::uint32_t>(); });
  auto shape = detail::field(j, "shape", what, [](const Json& v) { return shape_from_json(v); });
  require(shape.n() == n, ErrorKind::size_mismatch,
          "marginal: shape " + shape.to_string() + " does not sum to n = " + std::to_string(n));
  const auto& list = detail::field(j, "cells", what, [](const Json& v) -> const Json& {
    if (!v.is_array()) throw Error(ErrorKind::parse, "marginal: \"cells\" must be an array");
    return v;
  });
  std::vector<Cell<T>> cells;
  cells.reserve(list.size());
  for (const auto& c : list) {
    require(c.is_array() && c.size() == 3 && c[0].is_number_unsigned() && c[1].is_number_unsigned(),
            ErrorKind::parse, "marginal: each cell is [row, col, \"value\"] with 1-based indices");
    const auto row = c[0].template get<std::uint64_t>();
    const auto col = c[1].template get<std::uint64_t>();
    require(row >= 1 && col >= 1 && row <= 0xffffffffu && col <= 0xffffffffu,
            ErrorKind::out_of_range, "marginal: cell indices are 1-based");
    cells.push_back({static_cast<std::uint32_t>(row - 1), static_cast<std::uint32_t>(col - 1),
                     detail::value_of<T>(c[2], what)});
  }
  return MarginalMatrix<T>(std::move(shape), std::move(cells));
}

inline AnyMarginal marginal_from_json(const Json& j, ValueMode mode) {
  if (mode == ValueMode::exact) return marginal_as<Rational>(j);
  return marginal_as<double>(j);
}

inline AnyMarginal load_marginal(const std::string& path, ValueMode mode) {
  return marginal_from_json(parse_json(read_text(path), path), mode);
}

// ---------------------------------------------------------------------------
// reports

inline Json to_json(const AbortCertificate& c) {
  Json j{{"stage", c.stage}, {"detail", c.detail}};
  if (c.value_index) j["value_index"] = *c.value_index;
  return j;
}

template <Scalar T>
Json to_json(const RecoveryResult<T>& r) {
  Json j{{"status", r.recovered() ? "recovered" : "aborted"}, {"value_groups", r.group_count}};
  if (!r.ambiguity_checked) j["ambiguity_checked"] = false;
  if (r.certificate) {
    j["certificate"] = to_json(*r.certificate);
    return j;
  }
  Json comps = Json::array();
  for (const auto& c : r.components) {
    comps.push_back({{"value", format_scalar(c.value)},
                     {"membership", c.membership},
                     {"perm", to_json(c.sigma)}});
  }
  j["components"] = std::move(comps);
  j["function"] = to_json(r.function);
  return j;
}

inline Json to_json(const Condition1Report& r) {
  Json witness = Json::array();
  for (const auto& w : r.unique_witness.witness) {
    witness.push_back(w ? Json::array({w->row + 1, w->col + 1}) : Json(nullptr));
  }
  Json li{{"status", to_string(r.linear_independence.status)},
          {"detail", r.linear_independence.detail}};
  if (!r.linear_independence.coefficients.empty()) {
    li["coefficients"] = r.linear_independence.coefficients;
  }
  return {{"holds", r.holds()},
          {"unique_witness",
           {{"all_pass", r.unique_witness.all_pass()},
            {"failures", r.unique_witness.failures()},
            {"witness", std::move(witness)}}},
          {"linear_independence", std::move(li)}};
}

inline Json to_json(const L0Result& r) {
  Json sols = Json::array();
  for (const auto& s : r.solutions) sols.push_back(to_json(s));
  return {{"min_size", r.min_size ? Json(*r.min_size) : Json(nullptr)},
          {"unique", r.unique()},
          {"solutions", std::move(sols)},
          {"candidates", r.candidates},
          {"supports_examined", r.supports_examined},
          {"rank_deficient", r.rank_deficient}};
}

template <Scalar T>
Json to_json(const std::optional<L1Witness<T>>& w) {
  if (!w) return {{"found", false}};
  return {{"found", true},
          {"pair", Json::array({w->a + 1, w->b + 1})},
          {"c1", to_json(w->c1)},
          {"c2", to_json(w->c2)},
          {"alternative", to_json(w->g)}};
}

inline Json to_json(const ThresholdReport& r) {
  return {{"shape", r.shape},
          {"n", r.n},
          {"log_d_lambda", r.log_d_lambda},
          {"case", to_string(r.tag)},
          {"epsilon", r.epsilon},
          {"C", r.C},
          {"C_prime", r.C_prime},
          {"K_achievable", r.K_achievable},
          {"gamma", r.gamma},
          {"gamma_note", "exponent-scale estimate"},
          {"M_floor", r.M_floor},
          {"H", r.H},
          {"H_tail", r.H_tail},
          {"T", r.T},
          {"converse_constant", r.converse_constant},
          {"K_converse", r.K_converse}};
}

inline Json to_json(const EntropyRatioTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n}, {"H", r.H}, {"H_tail", r.H_tail}, {"ratio", r.ratio}});
  }
  return {{"family", to_string(t.family)}, {"monotone", t.monotone}, {"rows", std::move(rows)}};
}

inline Json to_json(const L1Experiment& e) {
  Json j{{"n", e.n}, {"trials", e.trials}, {"witnesses", e.witnesses},
         {"predicted", e.predicted.get_d()}};
  if (const auto f = e.fraction()) j["fraction"] = *f;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// Header plus one row per grid point; LF line endings. The seconds column is
/// empty unless the sweep recorded timing, which keeps untimed output stable.
inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "n,shape,K,schedule_tag,trials,successes,rate,seconds,seed\n";
  for (const auto& p : r.points) {
    const std::vector<std::string> row{std::to_string(p.n),
                                       p.shape,
                                       std::to_string(p.K),
                                       p.schedule_tag,
                                       std::to_string(p.trials),
                                       std::to_string(p.successes),
                                       format_scalar(p.rate()),
                                       p.seconds ? format_scalar(*p.seconds) : std::string(),
                                       std::to_string(p.seed)};
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += '\n';
  }
  return out;
}

/// Splits RFC 4180 text into rows of fields.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
    }
  }
  require(!quoted, ErrorKind::parse, "csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace symsparse::io
