/**
 * Synthetic dataset families (independent / correlated / anti-correlated
 * numeric values with Zipfian nominal values) and the Nursery loader.
 *
 * Generation is deterministic for a fixed seed: the generator draws from
 * mt19937_64 through fixed-width conversions only, so identical configs
 * produce byte-identical datasets on any platform.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <random>
#include <string>
#include <vector>

#include "core.hpp"
#include "types.hpp"

namespace skypref {

/** Deterministic RNG helper over mt19937_64. */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /** Uniform in [0, 1). */
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /** Uniform integer in [0, n). */
  std::uint64_t below(std::uint64_t n) {
    // unbiased rejection sampling
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  /** Standard exponential via inverse CDF. */
  double exponential() { return -std::log1p(-uniform01()); }

 private:
  std::mt19937_64 gen_;
};

/** Zipfian sampler: value k (0-based) drawn with weight (k+1)^-theta. */
class ZipfSampler {
 public:
  ZipfSampler(std::uint32_t cardinality, double theta) {
    cum_.reserve(cardinality);
    double total = 0.0;
    for (std::uint32_t k = 1; k <= cardinality; ++k) {
      total += std::pow(static_cast<double>(k), -theta);
      cum_.push_back(total);
    }
  }

  ValueId draw(Rng& rng) const {
    const double u = rng.uniform01() * cum_.back();
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    return static_cast<ValueId>(it - cum_.begin());
  }

 private:
  std::vector<double> cum_;  // inverse-CDF table
};

enum class DataKind { kIndependent, kCorrelated, kAntiCorrelated };

inline const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::kIndependent: return "independent";
    case DataKind::kCorrelated: return "correlated";
    case DataKind::kAntiCorrelated: return "anti-correlated";
  }
  return "?";
}

struct GenConfig {
  DataKind kind = DataKind::kIndependent;
  std::size_t n_tuples = 500'000;
  std::size_t n_numeric = 3;
  std::size_t n_nominal = 2;
  std::uint32_t cardinality = 20;
  double zipf_theta = 1.0;
  double jitter = 0.05;
  std::uint64_t seed = 1;
};

/**
 * Generates a dataset: numeric attributes in [0,1] following the family
 * (independent: i.i.d. uniform; correlated: clustered near the diagonal;
 * anti-correlated: near the constant-sum hyperplane), nominal attributes
 * i.i.d. Zipfian with the rank-1 value interned as id 0 ("v1").
 */
inline Dataset gen_synthetic(const GenConfig& cfg) {
  if (cfg.n_tuples == 0 || cfg.n_numeric == 0 || cfg.n_nominal == 0 || cfg.cardinality == 0)
    throw DataError("generator counts must be positive");
  if (cfg.zipf_theta < 0) throw DataError("zipf theta must be >= 0");

  std::vector<NumericAttr> nums;
  for (std::size_t i = 0; i < cfg.n_numeric; ++i)
    nums.push_back({"num" + std::to_string(i + 1), Direction::kMin});
  std::vector<NominalAttr> noms;
  for (std::size_t d = 0; d < cfg.n_nominal; ++d) {
    NominalAttr a{"nom" + std::to_string(d + 1), {}};
    for (std::uint32_t v = 1; v <= cfg.cardinality; ++v)
      a.domain.push_back("v" + std::to_string(v));
    noms.push_back(std::move(a));
  }

  Dataset data(Schema(std::move(nums), std::move(noms)));
  data.reserve(cfg.n_tuples);
  Rng rng(cfg.seed);
  const ZipfSampler zipf(cfg.cardinality, cfg.zipf_theta);
  const double half_sum = static_cast<double>(cfg.n_numeric) / 2.0;

  auto clamp01 = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };

  Point p;
  p.numeric.resize(cfg.n_numeric);
  p.nominal.resize(cfg.n_nominal);
  std::vector<double> expo(cfg.n_numeric);
  for (std::size_t i = 0; i < cfg.n_tuples; ++i) {
    p.id = static_cast<PointId>(i);
    switch (cfg.kind) {
      case DataKind::kIndependent:
        for (auto& v : p.numeric) v = rng.uniform01();
        break;
      case DataKind::kCorrelated: {
        const double base = rng.uniform01();
        for (auto& v : p.numeric)
          v = clamp01(base + cfg.jitter * (2.0 * rng.uniform01() - 1.0));
        break;
      }
      case DataKind::kAntiCorrelated: {
        double total = 0.0;
        for (auto& e : expo) {
          e = rng.exponential();
          total += e;
        }
        for (std::size_t k = 0; k < expo.size(); ++k) {
          const double on_plane = expo[k] / total * half_sum;
          p.numeric[k] = clamp01(on_plane + cfg.jitter * (2.0 * rng.uniform01() - 1.0));
        }
        break;
      }
    }
    for (auto& v : p.nominal) v = zipf.draw(rng);
    data.append(p);
  }
  return data;
}

/** Template preferring the most frequent value on every nominal dimension. */
inline Template frequency_template(const Dataset& data) {
  Template t = Template::for_schema(data.schema());
  for (std::size_t d = 0; d < data.schema().nominal_count(); ++d) {
    std::vector<std::size_t> count(data.schema().cardinality(d), 0);
    for (std::size_t r = 0; r < data.size(); ++r) ++count[data.nominal(r, d)];
    ValueId best = 0;
    for (ValueId v = 1; v < count.size(); ++v)
      if (count[v] > count[best]) best = v;
    t.set_list(data.schema(), d, {best});
  }
  return t;
}

// --- Nursery ------------------------------------------------------------------

/**
 * Schema for the Nursery data: six ordinal attributes treated as numeric
 * ranks (position in the canonical value order, first listed preferred)
 * and two nominal attributes of cardinality 4 (family form, number of
 * children).
 */
inline Schema nursery_schema() {
  return Schema(
      {{"parents", Direction::kMin},
       {"has_nurs", Direction::kMin},
       {"housing", Direction::kMin},
       {"finance", Direction::kMin},
       {"social", Direction::kMin},
       {"health", Direction::kMin}},
      {{"form", {"complete", "completed", "incomplete", "foster"}},
       {"children", {"1", "2", "3", "more"}}});
}

namespace detail {
inline const std::vector<std::vector<std::string>>& nursery_ordinal_values() {
  static const std::vector<std::vector<std::string>> vals = {
      {"usual", "pretentious", "great_pret"},
      {"proper", "less_proper", "improper", "critical", "very_crit"},
      {"convenient", "less_conv", "critical"},
      {"convenient", "inconv"},
      {"nonprob", "slightly_prob", "problematic"},
      {"recommended", "priority", "not_recom"}};
  return vals;
}
}  // namespace detail

/**
 * Loads the UCI Nursery file (raw comma-separated rows, no header; columns
 * parents, has_nurs, form, children, housing, finance, social, health and
 * an optional trailing class label, which is ignored).
 */
inline Dataset load_nursery(std::istream& is) {
  const Schema schema = nursery_schema();
  Dataset data(schema);
  // file column -> (attribute kind, attribute index)
  struct Col {
    bool nominal;
    std::size_t idx;
  };
  static const Col cols[8] = {{false, 0}, {false, 1}, {true, 0}, {true, 1},
                              {false, 2}, {false, 3}, {false, 4}, {false, 5}};
  const auto& ordinal_vals = detail::nursery_ordinal_values();

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view sv = line;
    while (!sv.empty() && (sv.back() == '\r' || sv.back() == ' ')) sv.remove_suffix(1);
    if (sv.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= sv.size(); ++i) {
      if (i == sv.size() || sv[i] == ',') {
        fields.push_back(sv.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 8 && fields.size() != 9)
      throw ParseError("row " + std::to_string(lineno) + ": expected 8 or 9 columns, got " +
                           std::to_string(fields.size()),
                       lineno);
    Point p;
    p.id = static_cast<PointId>(data.size());
    p.numeric.resize(6);
    p.nominal.resize(2);
    for (std::size_t c = 0; c < 8; ++c) {
      const std::string_view f = fields[c];
      if (cols[c].nominal) {
        const auto v = schema.value_id(cols[c].idx, f);
        if (!v)
          throw ParseError("row " + std::to_string(lineno) + ", column " +
                               std::to_string(c + 1) + ": unknown value '" + std::string(f) +
                               "'",
                           lineno);
        p.nominal[cols[c].idx] = *v;
      } else {
        const auto& vals = ordinal_vals[cols[c].idx];
        std::size_t rank = vals.size();
        for (std::size_t k = 0; k < vals.size(); ++k)
          if (vals[k] == f) {
            rank = k;
            break;
          }
        if (rank == vals.size())
          throw ParseError("row " + std::to_string(lineno) + ", column " +
                               std::to_string(c + 1) + ": unknown value '" + std::string(f) +
                               "'",
                           lineno);
        p.numeric[cols[c].idx] = static_cast<double>(rank);
      }
    }
    data.append(p);
  }
  return data;
}

}  // namespace skypref
