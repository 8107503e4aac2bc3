/**
 * Textual formats: the preference grammar, the dataset CSV and its schema
 * sidecar.
 *
 * Preference grammar:   attr: v1 < v2 < *; attr2: u1 < *
 *   - semicolon-separated per-dimension clauses, '*' terminator mandatory,
 *     omitted attributes mean an empty list.
 * Dataset CSV:          header "id,<numeric names...>,<nominal names...>",
 *   one row per point, numeric values as written by the source (direction
 *   is applied at ingestion).
 * Schema sidecar:       one line per attribute, in column order:
 *     numeric <name> min|max
 *     nominal <name> <v1,v2,...>
 *   '#' starts a comment. Names and values must not contain whitespace,
 *   commas, semicolons, colons or '<'.
 */
#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "types.hpp"

namespace skypref {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// --- preference grammar -------------------------------------------------

inline ImplicitPreference parse_pref(std::string_view text, const Schema& schema) {
  ImplicitPreference pref = ImplicitPreference::for_schema(schema);
  if (detail::trim(text).empty()) return pref;

  std::size_t clause_start = 0;
  for (std::string_view clause : detail::split(text, ';')) {
    const std::size_t base = clause_start;
    clause_start += clause.size() + 1;
    if (detail::trim(clause).empty()) continue;

    const std::size_t colon = clause.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("missing ':' in preference clause", base);
    const std::string_view name = detail::trim(clause.substr(0, colon));
    const auto dim = schema.find_nominal(name);
    if (!dim) {
      if (schema.find_numeric(name))
        throw ParseError("'" + std::string(name) + "' is not a nominal attribute", base);
      throw ParseError("unknown attribute '" + std::string(name) + "'", base);
    }

    const auto tokens = detail::split(clause.substr(colon + 1), '<');
    if (tokens.empty() || detail::trim(tokens.back()) != "*")
      throw ParseError("preference clause must end with '*'", base + colon + 1);

    std::vector<ValueId> values;
    std::size_t tok_off = colon + 1;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
      const std::string_view label = detail::trim(tokens[i]);
      const auto v = schema.value_id(*dim, label);
      if (!v)
        throw ParseError("unknown value '" + std::string(label) + "' for attribute '" +
                             std::string(name) + "'",
                         base + tok_off);
      if (std::find(values.begin(), values.end(), *v) != values.end())
        throw ParseError("duplicate value '" + std::string(label) + "'", base + tok_off);
      values.push_back(*v);
      tok_off += tokens[i].size() + 1;
    }
    if (!pref.list(*dim).empty())
      throw ParseError("attribute '" + std::string(name) + "' listed twice", base);
    pref.set_list(schema, *dim, std::move(values));
  }
  return pref;
}

inline std::string format_pref(const ImplicitPreference& pref, const Schema& schema) {
  std::string out;
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    if (pref.list(d).empty()) continue;
    if (!out.empty()) out += "; ";
    out += schema.nominal_attr(d).name;
    out += ": ";
    for (ValueId v : pref.list(d)) {
      out += schema.value_label(d, v);
      out += " < ";
    }
    out += "*";
  }
  return out;
}

// --- schema sidecar -------------------------------------------------------

inline void save_schema(const Schema& schema, std::ostream& os) {
  for (std::size_t i = 0; i < schema.numeric_count(); ++i) {
    const auto& a = schema.numeric_attr(i);
    os << "numeric " << a.name << ' '
       << (a.direction == Direction::kMin ? "min" : "max") << "\n";
  }
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    const auto& a = schema.nominal_attr(d);
    os << "nominal " << a.name << ' ';
    for (std::size_t v = 0; v < a.domain.size(); ++v) os << (v ? "," : "") << a.domain[v];
    os << "\n";
  }
}

inline Schema load_schema(std::istream& is) {
  std::vector<NumericAttr> numeric;
  std::vector<NominalAttr> nominal;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view sv = detail::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    std::istringstream ls{std::string(sv)};
    std::string kind, name, rest;
    if (!(ls >> kind >> name >> rest))
      throw ParseError("malformed schema line", lineno);
    if (kind == "numeric") {
      if (rest != "min" && rest != "max")
        throw ParseError("numeric direction must be 'min' or 'max'", lineno);
      numeric.push_back({name, rest == "min" ? Direction::kMin : Direction::kMax});
    } else if (kind == "nominal") {
      NominalAttr attr{name, {}};
      for (auto v : detail::split(rest, ',')) attr.domain.emplace_back(v);
      nominal.push_back(std::move(attr));
    } else {
      throw ParseError("unknown schema entry '" + kind + "'", lineno);
    }
  }
  return Schema(std::move(numeric), std::move(nominal));
}

// --- dataset CSV ------------------------------------------------------------

inline void save_dataset_csv(const Dataset& data, std::ostream& os) {
  const Schema& s = data.schema();
  os << "id";
  for (std::size_t i = 0; i < s.numeric_count(); ++i) os << ',' << s.numeric_attr(i).name;
  for (std::size_t d = 0; d < s.nominal_count(); ++d) os << ',' << s.nominal_attr(d).name;
  os << "\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    os << data.id(r);
    for (std::size_t i = 0; i < s.numeric_count(); ++i)
      os << ',' << detail::format_double(data.raw_numeric(r, i));
    for (std::size_t d = 0; d < s.nominal_count(); ++d)
      os << ',' << s.value_label(d, data.nominal(r, d));
    os << "\n";
  }
}

inline Dataset load_dataset_csv(std::istream& is, const Schema& schema) {
  Dataset data(schema);
  std::string line;
  if (!std::getline(is, line)) return data;

  // header must match the schema's column order exactly
  {
    std::string want = "id";
    for (std::size_t i = 0; i < schema.numeric_count(); ++i)
      want += "," + schema.numeric_attr(i).name;
    for (std::size_t d = 0; d < schema.nominal_count(); ++d)
      want += "," + schema.nominal_attr(d).name;
    if (std::string(detail::trim(line)) != want)
      throw ParseError("CSV header does not match the schema (expected '" + want + "')", 1);
  }

  const std::size_t ncols = 1 + schema.numeric_count() + schema.nominal_count();
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string_view sv = detail::trim(line);
    if (sv.empty()) continue;
    const auto fields = detail::split(sv, ',');
    if (fields.size() != ncols)
      throw ParseError("row " + std::to_string(lineno) + ": expected " +
                           std::to_string(ncols) + " columns, got " +
                           std::to_string(fields.size()),
                       lineno);
    Point p;
    {
      const auto f = detail::trim(fields[0]);
      const auto res = std::from_chars(f.data(), f.data() + f.size(), p.id);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        throw ParseError("row " + std::to_string(lineno) + ": bad id", lineno);
    }
    for (std::size_t i = 0; i < schema.numeric_count(); ++i) {
      const auto f = detail::trim(fields[1 + i]);
      double v = 0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
        throw ParseError("row " + std::to_string(lineno) + ", column '" +
                             schema.numeric_attr(i).name + "': bad numeric value",
                         lineno);
      p.numeric.push_back(v);
    }
    for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
      const auto f = detail::trim(fields[1 + schema.numeric_count() + d]);
      const auto v = schema.value_id(d, f);
      if (!v)
        throw ParseError("row " + std::to_string(lineno) + ", column '" +
                             schema.nominal_attr(d).name + "': unknown value '" +
                             std::string(f) + "'",
                         lineno);
      p.nominal.push_back(*v);
    }
    data.append(p);
  }
  return data;
}

// --- path conveniences -------------------------------------------------------

inline Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
  std::ifstream sf(schema_path);
  if (!sf) throw DataError("cannot open schema file: " + schema_path);
  const Schema schema = load_schema(sf);
  std::ifstream df(csv_path);
  if (!df) throw DataError("cannot open dataset file: " + csv_path);
  return load_dataset_csv(df, schema);
}

inline void save_dataset(const Dataset& data, const std::string& csv_path,
                         const std::string& schema_path) {
  std::ofstream sf(schema_path);
  if (!sf) throw DataError("cannot write schema file: " + schema_path);
  save_schema(data.schema(), sf);
  std::ofstream df(csv_path);
  if (!df) throw DataError("cannot write dataset file: " + csv_path);
  save_dataset_csv(data, df);
}

}  // namespace skypref
