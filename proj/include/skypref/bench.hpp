/**
 * Benchmark harness: preprocessing time, per-query time, snapshot storage
 * and skyline proportions over a set of random template-refining queries,
 * one CSV row per (algorithm, configuration).
 *
 * Timing uses the monotonic clock with one untimed warm-up run; runs are
 * single-threaded so numbers are comparable across algorithms.
 */
#pragma once

#include <chrono>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptive_sfs.hpp"
#include "core.hpp"
#include "datagen.hpp"
#include "io.hpp"
#include "ipo_tree.hpp"
#include "skyline.hpp"
#include "types.hpp"

namespace skypref {

enum class Algo { kSfsD, kSfsA, kIpoTree, kIpoTreeK };

inline const char* to_string(Algo a) {
  switch (a) {
    case Algo::kSfsD: return "sfs-d";
    case Algo::kSfsA: return "sfs-a";
    case Algo::kIpoTree: return "ipo-tree";
    case Algo::kIpoTreeK: return "ipo-tree-k";
  }
  return "?";
}

struct BenchMetrics {
  double preprocess_s = 0.0;
  double query_ms_mean = 0.0;
  std::uint64_t storage_bytes = 0;
  double prop_sky = 0.0;     // |SKY(template)| / N
  double prop_affect = 0.0;  // mean |AFFECT| / |SKY(template)|
  double prop_result = 0.0;  // mean |SKY(query)| / |SKY(template)|
  double set_ops = 0.0;      // mean fold-merge steps per query
  double comparisons = 0.0;  // mean dominance tests per query
};

struct BenchConfig {
  std::string kind_label = "independent";  // identity column only
  double zipf_theta = 0.0;                 // identity column only
  Template tmpl;
  std::vector<Algo> algos = {Algo::kSfsD, Algo::kSfsA, Algo::kIpoTree};
  std::size_t topk = 10;        // restriction size for ipo-tree-k
  std::uint32_t order = 3;      // order of generated query preferences
  std::size_t queries = 100;
  std::size_t reps = 100;       // repetitions for preprocessing timing
  std::uint64_t seed = 1;
  bool verify = false;          // cross-check all algorithms per query
};

struct BenchRow {
  std::string algorithm;
  std::string kind;
  std::size_t n_tuples = 0;
  std::size_t n_numeric = 0;
  std::size_t n_nominal = 0;
  std::uint32_t cardinality = 0;
  double theta = 0.0;
  std::uint32_t order = 0;
  BenchMetrics metrics;
};

/**
 * A uniformly random template-refining preference of the given order:
 * per dimension the template's list extended by a random ordered pick of
 * distinct unlisted values up to length max(order, template length).
 */
inline ImplicitPreference random_pref(const Schema& schema, std::uint32_t order,
                                      const Template& tmpl, Rng& rng) {
  ImplicitPreference pref = ImplicitPreference::for_schema(schema);
  for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
    const std::uint32_t c = schema.cardinality(d);
    if (order > c) throw DataError("query order exceeds the cardinality of dimension " +
                                   std::to_string(d));
    std::vector<ValueId> list = tmpl.list(d);
    std::vector<ValueId> rest;
    rest.reserve(c);
    for (ValueId v = 0; v < c; ++v)
      if (std::find(list.begin(), list.end(), v) == list.end()) rest.push_back(v);
    while (list.size() < order && !rest.empty()) {
      const std::size_t k = static_cast<std::size_t>(rng.below(rest.size()));
      list.push_back(rest[k]);
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    }
    pref.set_list(schema, d, std::move(list));
  }
  return pref;
}

inline ImplicitPreference random_pref(const Schema& schema, std::uint32_t order,
                                      const Template& tmpl, std::uint64_t seed) {
  Rng rng(seed);
  return random_pref(schema, order, tmpl, rng);
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    const auto d = std::chrono::steady_clock::now() - start_;
    const double s = std::chrono::duration<double>(d).count();
    if (s < 0) throw InternalError("negative duration measured");
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline void write_metrics_header(std::ostream& os) {
  os << "algorithm,kind,n_tuples,n_numeric,n_nominal,cardinality,theta,order,"
        "preprocess_s,query_ms_mean,storage_bytes,prop_sky,prop_affect,prop_result,"
        "set_ops,comparisons\n";
}

inline void write_metrics_row(std::ostream& os, const BenchRow& r) {
  os << r.algorithm << ',' << r.kind << ',' << r.n_tuples << ',' << r.n_numeric << ','
     << r.n_nominal << ',' << r.cardinality << ',' << detail::format_double(r.theta) << ','
     << r.order << ',' << detail::format_double(r.metrics.preprocess_s) << ','
     << detail::format_double(r.metrics.query_ms_mean) << ',' << r.metrics.storage_bytes << ','
     << detail::format_double(r.metrics.prop_sky) << ','
     << detail::format_double(r.metrics.prop_affect) << ','
     << detail::format_double(r.metrics.prop_result) << ','
     << detail::format_double(r.metrics.set_ops) << ','
     << detail::format_double(r.metrics.comparisons) << "\n";
}

/**
 * Runs every configured algorithm over the same random query workload.
 * Preprocessing artifacts are built once per algorithm (timed over
 * cfg.reps repetitions); each query is answered and timed once.
 */
inline std::vector<BenchRow> run_bench(const BenchConfig& cfg, const Dataset& data,
                                       std::ostream* csv = nullptr,
                                       const std::vector<ImplicitPreference>* fixed_queries =
                                           nullptr) {
  if (cfg.algos.empty()) throw DataError("benchmark needs at least one algorithm");
  cfg.tmpl.validate(data.schema());
  const Schema& schema = data.schema();
  const std::size_t n_points = data.size();

  std::vector<ImplicitPreference> queries;
  if (fixed_queries) {
    queries = *fixed_queries;
  } else {
    for (std::size_t q = 0; q < cfg.queries; ++q) {
      Rng rng(cfg.seed * 0x9e3779b97f4a7c15ULL + q);
      queries.push_back(random_pref(schema, cfg.order, cfg.tmpl, rng));
    }
  }

  // shared preprocessing (the list also provides prop_sky / prop_affect)
  const SortedSkylineList list = SortedSkylineList::preprocess(data, cfg.tmpl);
  const std::size_t n_sky = list.size();

  double affect_sum = 0.0;
  for (const auto& q : queries)
    affect_sum += n_sky ? static_cast<double>(list.affected(q).size()) / n_sky : 0.0;
  const double prop_affect = queries.empty() ? 0.0 : affect_sum / queries.size();
  const double prop_sky = n_points ? static_cast<double>(n_sky) / n_points : 0.0;

  std::optional<IpoTree> tree;
  std::optional<IpoTree> tree_k;
  std::uint32_t max_card = 0;
  for (std::size_t d = 0; d < schema.nominal_count(); ++d)
    max_card = std::max(max_card, schema.cardinality(d));

  std::vector<BenchRow> rows;
  std::vector<IdSet> reference;  // per-query result sets for verification

  for (Algo algo : cfg.algos) {
    BenchRow row;
    row.algorithm = to_string(algo);
    row.kind = cfg.kind_label;
    row.n_tuples = n_points;
    row.n_numeric = schema.numeric_count();
    row.n_nominal = schema.nominal_count();
    row.cardinality = max_card;
    row.theta = cfg.zipf_theta;
    row.order = cfg.order;
    BenchMetrics& m = row.metrics;
    m.prop_sky = prop_sky;
    m.prop_affect = prop_affect;

    // preprocessing (warm-up excluded, averaged over reps)
    const std::size_t reps = std::max<std::size_t>(1, cfg.reps);
    switch (algo) {
      case Algo::kSfsD:
        m.preprocess_s = 0.0;
        m.storage_bytes = 0;
        break;
      case Algo::kSfsA: {
        const detail::Stopwatch t;
        for (std::size_t r = 0; r < reps; ++r)
          (void)SortedSkylineList::preprocess(data, cfg.tmpl);
        m.preprocess_s = t.seconds() / static_cast<double>(reps);
        m.storage_bytes = list.storage_bytes();
        break;
      }
      case Algo::kIpoTree: {
        const detail::Stopwatch t;
        for (std::size_t r = 0; r < reps; ++r) tree = IpoTree::build(data, cfg.tmpl);
        m.preprocess_s = t.seconds() / static_cast<double>(reps);
        m.storage_bytes = tree->storage_bytes();
        break;
      }
      case Algo::kIpoTreeK: {
        const auto restriction = top_k_restriction(data, cfg.topk);
        const detail::Stopwatch t;
        for (std::size_t r = 0; r < reps; ++r)
          tree_k = IpoTree::build(data, cfg.tmpl, restriction);
        m.preprocess_s = t.seconds() / static_cast<double>(reps);
        m.storage_bytes = tree_k->storage_bytes();
        break;
      }
    }

    auto answer = [&](const ImplicitPreference& q, QueryStats* stats) -> SkylineResult {
      switch (algo) {
        case Algo::kSfsD: return sfs_full(data, q, stats);
        case Algo::kSfsA: return list.adaptive_query(q, stats);
        case Algo::kIpoTree: return tree->query(q, stats);
        case Algo::kIpoTreeK: return query_with_fallback(*tree_k, list, q, stats);
      }
      throw InternalError("unreachable");
    };

    if (!queries.empty()) {
      (void)answer(queries.front(), nullptr);  // warm-up
      QueryStats stats;
      double result_sum = 0.0;
      double total_s = 0.0;
      for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        const detail::Stopwatch t;
        const SkylineResult res = answer(queries[qi], &stats);
        total_s += t.seconds();
        result_sum += n_sky ? static_cast<double>(res.members.size()) / n_sky : 0.0;
        if (cfg.verify) {
          if (reference.size() <= qi)
            reference.push_back(res.members);
          else if (reference[qi] != res.members)
            throw InternalError("algorithms disagree on query " + std::to_string(qi));
        }
      }
      m.query_ms_mean = total_s * 1000.0 / static_cast<double>(queries.size());
      m.prop_result = result_sum / static_cast<double>(queries.size());
      m.set_ops = static_cast<double>(stats.fold_merges) / static_cast<double>(queries.size());
      m.comparisons =
          static_cast<double>(stats.comparisons) / static_cast<double>(queries.size());
      if (m.prop_result > 1.0 + 1e-12)
        throw InternalError("result proportion exceeds 1 (monotonicity violated)");
    }
    rows.push_back(std::move(row));
  }

  if (csv) {
    write_metrics_header(*csv);
    for (const auto& r : rows) write_metrics_row(*csv, r);
  }
  return rows;
}

}  // namespace skypref
