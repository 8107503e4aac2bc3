/**
 * Data model and preference language for skyline queries over mixed
 * numeric / nominal attributes.
 *
 * Conventions baked in at ingestion:
 *  - numeric attributes are normalized so that smaller is always better
 *    (max-direction attributes are negated when a point enters a Dataset);
 *  - nominal values are interned to dense ids, the index of the value
 *    label inside its declared domain.
 *
 * A user preference is an ordered list of favorite values per nominal
 * attribute ("v1 < v2 < *", listed values beat every unlisted one).
 * Expanding a preference yields the equivalent set of binary value
 * orders, which is what the dominance test consumes. A template is a
 * baseline preference shared by all users; a query is valid when its
 * expansion refines the template's and the two are conflict-free.
 *
 * All types here are immutable after construction (Dataset mutation is
 * explicit via append/remove) and safe to share across concurrent readers.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "types.hpp"

namespace skypref {

enum class Direction { kMin, kMax };

struct NumericAttr {
  std::string name;
  Direction direction = Direction::kMin;
  bool operator==(const NumericAttr&) const = default;
};

struct NominalAttr {
  std::string name;
  std::vector<std::string> domain;  // value id == index into this list
  bool operator==(const NominalAttr&) const = default;
};

/**
 * Attribute metadata: ordered numeric attributes followed by ordered
 * nominal attributes. Attribute names are unique across both groups;
 * every nominal domain is non-empty with distinct labels.
 */
class Schema {
 public:
  Schema() = default;

  Schema(std::vector<NumericAttr> numeric, std::vector<NominalAttr> nominal)
      : numeric_(std::move(numeric)), nominal_(std::move(nominal)) {
    std::unordered_map<std::string_view, int> seen;
    for (const auto& a : numeric_) {
      if (a.name.empty() || ++seen[a.name] > 1)
        throw SchemaError("duplicate or empty attribute name: " + a.name);
    }
    for (const auto& a : nominal_) {
      if (a.name.empty() || ++seen[a.name] > 1)
        throw SchemaError("duplicate or empty attribute name: " + a.name);
      if (a.domain.empty())
        throw SchemaError("nominal attribute '" + a.name + "' has an empty domain");
      std::unordered_map<std::string_view, int> vals;
      for (const auto& v : a.domain) {
        if (v.empty() || ++vals[v] > 1)
          throw SchemaError("duplicate or empty value label in '" + a.name + "'");
      }
    }
  }

  std::size_t numeric_count() const { return numeric_.size(); }
  std::size_t nominal_count() const { return nominal_.size(); }

  const NumericAttr& numeric_attr(std::size_t i) const { return numeric_[i]; }
  const NominalAttr& nominal_attr(std::size_t d) const { return nominal_[d]; }

  /** Cardinality c_d of nominal dimension d. */
  std::uint32_t cardinality(std::size_t d) const {
    return static_cast<std::uint32_t>(nominal_[d].domain.size());
  }

  std::optional<std::size_t> find_numeric(std::string_view name) const {
    for (std::size_t i = 0; i < numeric_.size(); ++i)
      if (numeric_[i].name == name) return i;
    return std::nullopt;
  }

  std::optional<std::size_t> find_nominal(std::string_view name) const {
    for (std::size_t d = 0; d < nominal_.size(); ++d)
      if (nominal_[d].name == name) return d;
    return std::nullopt;
  }

  std::optional<ValueId> value_id(std::size_t dim, std::string_view label) const {
    const auto& dom = nominal_[dim].domain;
    for (std::size_t v = 0; v < dom.size(); ++v)
      if (dom[v] == label) return static_cast<ValueId>(v);
    return std::nullopt;
  }

  const std::string& value_label(std::size_t dim, ValueId v) const {
    return nominal_[dim].domain[v];
  }

  bool operator==(const Schema&) const = default;

 private:
  std::vector<NumericAttr> numeric_;
  std::vector<NominalAttr> nominal_;
};

/** FNV-1a hash of the schema layout, used to pair snapshots with datasets. */
inline std::uint64_t schema_hash(const Schema& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view sv) {
    for (unsigned char c : sv) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < s.numeric_count(); ++i) {
    mix(s.numeric_attr(i).name);
    mix(s.numeric_attr(i).direction == Direction::kMin ? "min" : "max");
  }
  for (std::size_t d = 0; d < s.nominal_count(); ++d) {
    mix(s.nominal_attr(d).name);
    for (const auto& v : s.nominal_attr(d).domain) mix(v);
  }
  return h;
}

/**
 * A tuple as provided by the data source. Numeric values are raw (the
 * declared direction is applied when the point is appended to a Dataset);
 * nominal values are interned ids.
 */
struct Point {
  PointId id = 0;
  std::vector<double> numeric;
  std::vector<ValueId> nominal;
};

/**
 * An in-memory set of points with columnar storage. Numeric values are
 * kept normalized (smaller is better); use raw_numeric for the original
 * source-side value. Point ids are unique; rows may be reordered by
 * remove(), so address points by id where stability matters.
 */
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }
  std::size_t size() const { return ids_.size(); }

  void reserve(std::size_t n) {
    ids_.reserve(n);
    numeric_.reserve(n * schema_.numeric_count());
    nominal_.reserve(n * schema_.nominal_count());
  }

  void append(const Point& p) {
    if (p.numeric.size() != schema_.numeric_count() ||
        p.nominal.size() != schema_.nominal_count())
      throw SchemaError("point " + std::to_string(p.id) + " does not match the schema");
    if (id_to_row_.count(p.id))
      throw SchemaError("duplicate point id " + std::to_string(p.id));
    for (double v : p.numeric)
      if (!std::isfinite(v))
        throw SchemaError("non-finite numeric value in point " + std::to_string(p.id));
    for (std::size_t d = 0; d < p.nominal.size(); ++d)
      if (p.nominal[d] >= schema_.cardinality(d))
        throw SchemaError("nominal value out of range in point " + std::to_string(p.id));

    id_to_row_.emplace(p.id, ids_.size());
    ids_.push_back(p.id);
    for (std::size_t i = 0; i < p.numeric.size(); ++i) {
      double v = p.numeric[i];
      if (schema_.numeric_attr(i).direction == Direction::kMax) v = -v;
      numeric_.push_back(v);
    }
    nominal_.insert(nominal_.end(), p.nominal.begin(), p.nominal.end());
  }

  /** Removes a point by id (swap-erase; row order changes). */
  bool remove(PointId id) {
    auto it = id_to_row_.find(id);
    if (it == id_to_row_.end()) return false;
    const std::size_t row = it->second;
    const std::size_t last = ids_.size() - 1;
    const std::size_t m = schema_.numeric_count();
    const std::size_t md = schema_.nominal_count();
    if (row != last) {
      ids_[row] = ids_[last];
      for (std::size_t k = 0; k < m; ++k) numeric_[row * m + k] = numeric_[last * m + k];
      for (std::size_t k = 0; k < md; ++k) nominal_[row * md + k] = nominal_[last * md + k];
      id_to_row_[ids_[row]] = row;
    }
    ids_.pop_back();
    numeric_.resize(last * m);
    nominal_.resize(last * md);
    id_to_row_.erase(it);
    return true;
  }

  PointId id(std::size_t row) const { return ids_[row]; }

  std::optional<std::size_t> row_of(PointId id) const {
    auto it = id_to_row_.find(id);
    if (it == id_to_row_.end()) return std::nullopt;
    return it->second;
  }

  /** Normalized numeric value (smaller is better). */
  double numeric(std::size_t row, std::size_t k) const {
    return numeric_[row * schema_.numeric_count() + k];
  }

  /** Source-side numeric value (direction un-applied). */
  double raw_numeric(std::size_t row, std::size_t k) const {
    double v = numeric(row, k);
    return schema_.numeric_attr(k).direction == Direction::kMax ? -v : v;
  }

  ValueId nominal(std::size_t row, std::size_t d) const {
    return nominal_[row * schema_.nominal_count() + d];
  }

  std::span<const double> numeric_row(std::size_t row) const {
    const std::size_t m = schema_.numeric_count();
    return {numeric_.data() + row * m, m};
  }

  std::span<const ValueId> nominal_row(std::size_t row) const {
    const std::size_t md = schema_.nominal_count();
    return {nominal_.data() + row * md, md};
  }

 private:
  Schema schema_;
  std::vector<PointId> ids_;
  std::vector<double> numeric_;   // size() * numeric_count(), normalized
  std::vector<ValueId> nominal_;  // size() * nominal_count()
  std::unordered_map<PointId, std::size_t> id_to_row_;
};

/**
 * Per-dimension ordered favorite lists: "v1 < v2 < ... < vx < *". An empty
 * list means no preference on that dimension. order() is the longest list.
 */
class ImplicitPreference {
 public:
  ImplicitPreference() = default;
  explicit ImplicitPreference(std::size_t nominal_dims) : lists_(nominal_dims) {}

  static ImplicitPreference for_schema(const Schema& s) {
    return ImplicitPreference(s.nominal_count());
  }

  std::size_t dims() const { return lists_.size(); }
  const std::vector<ValueId>& list(std::size_t d) const { return lists_[d]; }

  void set_list(const Schema& schema, std::size_t d, std::vector<ValueId> values) {
    if (lists_.size() != schema.nominal_count())
      throw SchemaError("preference does not match the schema's nominal dimensions");
    std::vector<bool> seen(schema.cardinality(d), false);
    for (ValueId v : values) {
      if (v >= schema.cardinality(d))
        throw SchemaError("preference value out of range for dimension " + std::to_string(d));
      if (seen[v])
        throw SchemaError("duplicate preference value in dimension " + std::to_string(d));
      seen[v] = true;
    }
    lists_[d] = std::move(values);
  }

  std::uint32_t order_of(std::size_t d) const {
    return static_cast<std::uint32_t>(lists_[d].size());
  }

  /** max over dimensions of the list length; 0 when all lists are empty. */
  std::uint32_t order() const {
    std::uint32_t x = 0;
    for (const auto& l : lists_) x = std::max<std::uint32_t>(x, static_cast<std::uint32_t>(l.size()));
    return x;
  }

  bool empty() const {
    for (const auto& l : lists_)
      if (!l.empty()) return false;
    return true;
  }

  void validate(const Schema& schema) const {
    if (lists_.size() != schema.nominal_count())
      throw SchemaError("preference does not match the schema's nominal dimensions");
    for (std::size_t d = 0; d < lists_.size(); ++d) {
      std::vector<bool> seen(schema.cardinality(d), false);
      for (ValueId v : lists_[d]) {
        if (v >= schema.cardinality(d))
          throw SchemaError("preference value out of range for dimension " + std::to_string(d));
        if (seen[v]) throw SchemaError("duplicate preference value in dimension " + std::to_string(d));
        seen[v] = true;
      }
    }
  }

  bool operator==(const ImplicitPreference&) const = default;

 private:
  std::vector<std::vector<ValueId>> lists_;
};

/** The baseline preference shared by all users; queries must refine it. */
using Template = ImplicitPreference;

/**
 * A set of strict binary value orders per nominal dimension, stored as a
 * dense boolean matrix for O(1) lookups. Irreflexive and antisymmetric by
 * construction; expansion of an implicit preference is also transitively
 * closed.
 */
class BinaryOrderSet {
 public:
  BinaryOrderSet() = default;

  static BinaryOrderSet empty_for(const Schema& schema) {
    BinaryOrderSet r;
    r.card_.reserve(schema.nominal_count());
    r.matrix_.reserve(schema.nominal_count());
    for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
      const std::uint32_t c = schema.cardinality(d);
      r.card_.push_back(c);
      r.matrix_.emplace_back(static_cast<std::size_t>(c) * c, 0);
    }
    return r;
  }

  std::size_t dims() const { return card_.size(); }
  std::uint32_t cardinality(std::size_t d) const { return card_[d]; }

  /** True iff u strictly precedes v on dimension d. */
  bool less(std::size_t d, ValueId u, ValueId v) const {
    return matrix_[d][static_cast<std::size_t>(u) * card_[d] + v] != 0;
  }

  void add(std::size_t d, ValueId u, ValueId v) {
    if (u == v) throw SchemaError("reflexive binary order");
    if (u >= card_[d] || v >= card_[d]) throw SchemaError("binary order value out of range");
    if (less(d, v, u)) throw SchemaError("conflicting binary order");
    matrix_[d][static_cast<std::size_t>(u) * card_[d] + v] = 1;
  }

  std::size_t pair_count(std::size_t d) const {
    std::size_t n = 0;
    for (auto b : matrix_[d]) n += b;
    return n;
  }

  std::size_t pair_count() const {
    std::size_t n = 0;
    for (std::size_t d = 0; d < dims(); ++d) n += pair_count(d);
    return n;
  }

  /** fn(u, v) for every ordered pair u < v on dimension d. */
  template <class Fn>
  void for_each_pair(std::size_t d, Fn&& fn) const {
    const std::uint32_t c = card_[d];
    for (ValueId u = 0; u < c; ++u)
      for (ValueId v = 0; v < c; ++v)
        if (matrix_[d][static_cast<std::size_t>(u) * c + v]) fn(u, v);
  }

  bool operator==(const BinaryOrderSet&) const = default;

 private:
  std::vector<std::uint32_t> card_;
  std::vector<std::vector<std::uint8_t>> matrix_;
};

/**
 * Expands an implicit preference into its equivalent binary-order set:
 * for a list v1 < ... < vx, every vi precedes every later entry and every
 * unlisted domain value.
 */
inline BinaryOrderSet expand(const ImplicitPreference& pref, const Schema& schema) {
  pref.validate(schema);
  BinaryOrderSet r = BinaryOrderSet::empty_for(schema);
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    const auto& listed = pref.list(d);
    const std::uint32_t c = schema.cardinality(d);
    std::vector<bool> is_listed(c, false);
    for (ValueId v : listed) is_listed[v] = true;
    for (std::size_t i = 0; i < listed.size(); ++i) {
      for (std::size_t j = i + 1; j < listed.size(); ++j) r.add(d, listed[i], listed[j]);
      for (ValueId u = 0; u < c; ++u)
        if (!is_listed[u]) r.add(d, listed[i], u);
    }
  }
  return r;
}

/**
 * Strict dominance test on normalized rows: p dominates q iff p is no
 * worse on every dimension (numeric: <=, nominal: equal or ordered before)
 * and strictly better on at least one.
 */
inline bool dominates(std::span<const double> pn, std::span<const ValueId> pv,
                      std::span<const double> qn, std::span<const ValueId> qv,
                      const BinaryOrderSet& orders) {
  bool strict = false;
  for (std::size_t i = 0; i < pn.size(); ++i) {
    if (pn[i] > qn[i]) return false;
    if (pn[i] < qn[i]) strict = true;
  }
  for (std::size_t d = 0; d < pv.size(); ++d) {
    if (pv[d] == qv[d]) continue;
    if (!orders.less(d, pv[d], qv[d])) return false;
    strict = true;
  }
  return strict;
}

inline bool dominates(const Dataset& data, std::size_t row_p, std::size_t row_q,
                      const BinaryOrderSet& orders) {
  return dominates(data.numeric_row(row_p), data.nominal_row(row_p),
                   data.numeric_row(row_q), data.nominal_row(row_q), orders);
}

/** True iff candidate contains every pair of base, per dimension. */
inline bool is_refinement(const BinaryOrderSet& base, const BinaryOrderSet& candidate) {
  if (base.dims() != candidate.dims()) return false;
  for (std::size_t d = 0; d < base.dims(); ++d) {
    if (base.cardinality(d) != candidate.cardinality(d)) return false;
    bool ok = true;
    base.for_each_pair(d, [&](ValueId u, ValueId v) {
      if (!candidate.less(d, u, v)) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/** True iff no value pair is ordered oppositely by r1 and r2 on any dimension. */
inline bool conflict_free(const BinaryOrderSet& r1, const BinaryOrderSet& r2) {
  if (r1.dims() != r2.dims()) return false;
  for (std::size_t d = 0; d < r1.dims(); ++d) {
    bool ok = true;
    r1.for_each_pair(d, [&](ValueId u, ValueId v) {
      if (r2.less(d, v, u)) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/**
 * A query is admissible against a template iff its expansion refines the
 * template's expansion and the two are conflict-free.
 */
inline bool validate_query(const Schema& schema, const Template& tmpl,
                           const ImplicitPreference& pref) {
  const BinaryOrderSet base = expand(tmpl, schema);
  const BinaryOrderSet cand = expand(pref, schema);
  return is_refinement(base, cand) && conflict_free(base, cand);
}

}  // namespace skypref
