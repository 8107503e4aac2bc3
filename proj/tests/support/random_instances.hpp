// Random instance generators and the oracle-equivalence trial shared by the
// property tests and the acceptance suite.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "skypref/adaptive_sfs.hpp"
#include "skypref/core.hpp"
#include "skypref/datagen.hpp"
#include "skypref/ipo_tree.hpp"
#include "skypref/skyline.hpp"

namespace skypref::testing {

struct InstanceLimits {
  std::size_t max_points = 200;
  std::size_t max_numeric = 3;
  std::size_t max_nominal = 3;
  std::uint32_t max_cardinality = 6;
};

inline Schema random_schema(Rng& rng, const InstanceLimits& lim = {}) {
  const std::size_t m = 1 + rng.below(lim.max_numeric);
  const std::size_t md = 1 + rng.below(lim.max_nominal);
  std::vector<NumericAttr> nums;
  for (std::size_t i = 0; i < m; ++i)
    nums.push_back({"n" + std::to_string(i), Direction::kMin});
  std::vector<NominalAttr> noms;
  for (std::size_t d = 0; d < md; ++d) {
    const std::uint32_t c = 2 + static_cast<std::uint32_t>(rng.below(lim.max_cardinality - 1));
    NominalAttr a{"d" + std::to_string(d), {}};
    for (std::uint32_t v = 0; v < c; ++v) a.domain.push_back("v" + std::to_string(v));
    noms.push_back(std::move(a));
  }
  return Schema(std::move(nums), std::move(noms));
}

/** Random dataset over the schema; occasionally repeats a row's values
 *  under a fresh id so ties and duplicates get exercised. */
inline Dataset random_dataset(Rng& rng, const Schema& schema, std::size_t n) {
  Dataset data(schema);
  for (std::size_t i = 0; i < n; ++i) {
    Point p;
    p.id = static_cast<PointId>(i);
    if (i > 0 && rng.below(20) == 0) {
      const std::size_t src = rng.below(i);
      for (std::size_t k = 0; k < schema.numeric_count(); ++k)
        p.numeric.push_back(data.raw_numeric(src, k));
      for (std::size_t d = 0; d < schema.nominal_count(); ++d)
        p.nominal.push_back(data.nominal(src, d));
    } else {
      // small value grid keeps dominance frequent at tiny sizes
      for (std::size_t k = 0; k < schema.numeric_count(); ++k)
        p.numeric.push_back(static_cast<double>(rng.below(16)) / 15.0);
      for (std::size_t d = 0; d < schema.nominal_count(); ++d)
        p.nominal.push_back(static_cast<ValueId>(rng.below(schema.cardinality(d))));
    }
    data.append(p);
  }
  return data;
}

inline std::vector<ValueId> random_distinct_values(Rng& rng, std::uint32_t cardinality,
                                                   std::size_t len) {
  std::vector<ValueId> all(cardinality);
  for (std::uint32_t v = 0; v < cardinality; ++v) all[v] = v;
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t j = i + rng.below(all.size() - i);
    std::swap(all[i], all[j]);
  }
  all.resize(len);
  return all;
}

inline Template random_template(Rng& rng, const Schema& schema, std::size_t max_len = 2) {
  Template t = Template::for_schema(schema);
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    const std::size_t len =
        rng.below(std::min<std::size_t>(max_len, schema.cardinality(d)) + 1);
    t.set_list(schema, d, random_distinct_values(rng, schema.cardinality(d), len));
  }
  return t;
}

/** Extends the template's per-dimension lists by random distinct values. */
inline ImplicitPreference random_refining_query(Rng& rng, const Schema& schema,
                                                const Template& tmpl) {
  ImplicitPreference q = ImplicitPreference::for_schema(schema);
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    std::vector<ValueId> list = tmpl.list(d);
    const std::size_t room = schema.cardinality(d) - list.size();
    const std::size_t extra = rng.below(room + 1);
    std::vector<ValueId> rest;
    for (ValueId v = 0; v < schema.cardinality(d); ++v)
      if (std::find(list.begin(), list.end(), v) == list.end()) rest.push_back(v);
    for (std::size_t i = 0; i < extra; ++i) {
      const std::size_t j = i + rng.below(rest.size() - i);
      std::swap(rest[i], rest[j]);
      list.push_back(rest[i]);
    }
    q.set_list(schema, d, std::move(list));
  }
  return q;
}

/**
 * Runs one oracle-equivalence trial: every algorithm must return the same
 * set as the brute-force oracle, emission streams must be prefix-stable
 * and the instrumentation bounds must hold. Returns an explanation on
 * failure.
 */
inline std::optional<std::string> oracle_equivalence_trial(const Dataset& data,
                                                           const Template& tmpl,
                                                           const ImplicitPreference& q,
                                                           const SortedSkylineList& list,
                                                           const IpoTree& tree) {
  const Schema& schema = data.schema();
  const SkylineResult oracle = brute_force_skyline(data, expand(q, schema));

  // SFS over the whole dataset, with the emission stream captured
  std::vector<PointId> full_stream;
  const SkylineResult full =
      sfs_full(data, q, nullptr, [&](PointId id) { full_stream.push_back(id); });
  if (full.members != oracle.members) return "equivalence: sfs_full disagrees with the oracle";
  if (full_stream != full.emission_order) return "progressive: sfs_full emission stream mismatch";
  for (PointId id : full_stream)
    if (!set_contains(oracle.members, id)) return "progressive: sfs_full emitted a retractable point";

  // adaptive SFS
  QueryStats astats;
  std::vector<PointId> astream;
  const SkylineResult adaptive =
      list.adaptive_query(q, &astats, [&](PointId id) { astream.push_back(id); });
  if (adaptive.members != oracle.members) return "equivalence: adaptive_query disagrees with the oracle";
  if (astream != adaptive.emission_order) return "progressive: adaptive emission stream mismatch";
  for (PointId id : astream)
    if (!set_contains(oracle.members, id)) return "progressive: adaptive emitted a retractable point";
  if (!is_subset(adaptive.members, list.members()))
    return "equivalence: adaptive result leaves the preprocessed skyline";
  if (astats.rescored != list.affected(q).size())
    return "workbound: re-scored entry count differs from |AFFECT|";
  const SkylineResult plain = list.adaptive_query_plain(q);
  if (plain.members != oracle.members) return "equivalence: plain extraction disagrees with the oracle";

  // IPO-tree, both evaluation strategies
  QueryStats tstats;
  const SkylineResult ipo = tree.query(q, &tstats);
  if (ipo.members != oracle.members) return "equivalence: ipo query disagrees with the oracle";
  const IdSet disq = tree.query_disqualified(q);
  if (set_minus(tree.root_skyline(), disq) != oracle.members)
    return "equivalence: disqualified-set complement disagrees with the oracle";
  std::uint64_t fold_bound = 1;
  for (std::size_t d = 0; d < schema.nominal_count(); ++d)
    fold_bound *= std::max<std::uint64_t>(q.list(d).size(), 1);
  if (tstats.fold_merges > fold_bound) return "workbound: fold-merge count exceeds the bound";

  return std::nullopt;
}

}  // namespace skypref::testing
