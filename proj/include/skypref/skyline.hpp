/**
 * Baseline skyline computation: the quadratic reference algorithm and the
 * sort-first-skyline (SFS) scan over the full dataset.
 *
 * SFS relies on a dominance-monotone score: each nominal value gets a rank
 * (listed values rank by list position, every unlisted value ranks at the
 * dimension cardinality), and a point's score is the sum of its normalized
 * numeric values and nominal ranks. Dominance then implies a strictly
 * smaller score, so one ascending scan against the growing skyline list is
 * enough and emitted points are final (progressive output).
 */
#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "core.hpp"
#include "types.hpp"

namespace skypref {

/** A skyline: member ids plus the order in which they were emitted. */
struct SkylineResult {
  IdSet members;                       // ascending ids
  std::vector<PointId> emission_order; // algorithm-specific order

  bool same_set(const SkylineResult& o) const { return members == o.members; }
};

using EmitFn = std::function<void(PointId)>;

/**
 * Per-dimension value ranks derived from a preference: the j-th listed
 * value has rank j (1-based); every other value has rank c_d.
 */
class RankAssignment {
 public:
  RankAssignment() = default;
  explicit RankAssignment(std::vector<std::vector<std::uint32_t>> ranks)
      : ranks_(std::move(ranks)) {}

  std::uint32_t rank(std::size_t d, ValueId v) const { return ranks_[d][v]; }
  std::size_t dims() const { return ranks_.size(); }
  const std::vector<std::uint32_t>& dim_ranks(std::size_t d) const { return ranks_[d]; }

 private:
  std::vector<std::vector<std::uint32_t>> ranks_;
};

inline RankAssignment rank_of(const ImplicitPreference& pref, const Schema& schema) {
  pref.validate(schema);
  std::vector<std::vector<std::uint32_t>> ranks(schema.nominal_count());
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    ranks[d].assign(schema.cardinality(d), schema.cardinality(d));
    const auto& listed = pref.list(d);
    for (std::size_t j = 0; j < listed.size(); ++j)
      ranks[d][listed[j]] = static_cast<std::uint32_t>(j + 1);
  }
  return RankAssignment(std::move(ranks));
}

/** Sum of normalized numeric values and nominal ranks. */
inline Score score_of(const Dataset& data, std::size_t row, const RankAssignment& ranks) {
  Score s = 0.0;
  for (std::size_t k = 0; k < data.schema().numeric_count(); ++k) s += data.numeric(row, k);
  for (std::size_t d = 0; d < data.schema().nominal_count(); ++d)
    s += ranks.rank(d, data.nominal(row, d));
  return s;
}

/**
 * Reference skyline by definition: a point is kept iff no other point
 * dominates it. O(N^2) dominance tests; emission ascends by point id.
 */
inline SkylineResult brute_force_skyline(const Dataset& data, const BinaryOrderSet& orders,
                                         QueryStats* stats = nullptr) {
  SkylineResult out;
  const std::size_t n = data.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < n && !dominated; ++j) {
      if (j == i) continue;
      if (stats) ++stats->comparisons;
      dominated = dominates(data, j, i, orders);
    }
    if (!dominated) out.members.push_back(data.id(i));
  }
  std::sort(out.members.begin(), out.members.end());
  out.emission_order = out.members;
  return out;
}

/**
 * Sort-first skyline over the whole dataset for a given preference
 * (the per-query baseline). Points are scanned in ascending (score, id)
 * order; a point joins the skyline list iff no already-listed point
 * dominates it. The result set equals brute_force_skyline; the emission
 * order is the scan order restricted to members.
 */
inline SkylineResult sfs_full(const Dataset& data, const ImplicitPreference& pref,
                              QueryStats* stats = nullptr, const EmitFn& emit = {}) {
  const RankAssignment ranks = rank_of(pref, data.schema());
  const BinaryOrderSet orders = expand(pref, data.schema());
  const std::size_t n = data.size();

  std::vector<Score> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = score_of(data, i, ranks);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    return data.id(a) < data.id(b);
  });

  SkylineResult out;
  std::vector<std::uint32_t> accepted;  // rows, ascending score
  for (std::uint32_t row : order) {
    bool dominated = false;
    for (std::uint32_t a : accepted) {
      if (stats) ++stats->comparisons;
      if (dominates(data, a, row, orders)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      accepted.push_back(row);
      out.emission_order.push_back(data.id(row));
      if (emit) emit(data.id(row));
    }
  }
  out.members = out.emission_order;
  std::sort(out.members.begin(), out.members.end());
  return out;
}

}  // namespace skypref
