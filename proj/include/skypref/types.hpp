/**
 * Shared identifiers, set helpers, counters and error types.
 */
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace skypref {

using PointId = std::uint32_t;
using ValueId = std::uint32_t;
using Score = double;

/** Canonical set-of-points representation: ascending ids, duplicate-free. */
using IdSet = std::vector<PointId>;

/** Input violates the schema (unknown value, duplicate id, NaN score, ...). */
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Malformed textual input (preference grammar, CSV, snapshot files). */
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  explicit ParseError(const std::string& msg) : std::runtime_error(msg), position_(0) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/** Inconsistent runtime data (snapshot/dataset mismatch, invalid query). */
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** An IPO-tree query touched a value outside the materialized restriction. */
class NotMaterializedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Internal consistency failure (cross-check mismatch, timing anomaly). */
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Per-query instrumentation counters. */
struct QueryStats {
  std::uint64_t comparisons = 0;  ///< dominance tests performed
  std::uint64_t rescored = 0;     ///< list entries re-positioned (adaptive SFS)
  std::uint64_t fold_merges = 0;  ///< pairwise merge steps (IPO-tree)
};

// --- sorted IdSet algebra ---------------------------------------------------

inline IdSet set_intersect(const IdSet& a, const IdSet& b) {
  IdSet out;
  out.reserve(std::min(a.size(), b.size()));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IdSet set_union(const IdSet& a, const IdSet& b) {
  IdSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline IdSet set_minus(const IdSet& a, const IdSet& b) {
  IdSet out;
  out.reserve(a.size());
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool set_contains(const IdSet& a, PointId id) {
  return std::binary_search(a.begin(), a.end(), id);
}

inline bool is_subset(const IdSet& sub, const IdSet& super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

inline IdSet make_set(std::vector<PointId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace skypref
