/**
 * Adaptive SFS: answer implicit-preference queries from the template
 * skyline instead of the whole dataset.
 *
 * Preprocessing computes the skyline under the template, sorts it by the
 * template score and indexes members by nominal value. A query only
 * re-positions the members whose value ranks change (the affected set);
 * the re-scored entries are merged with the untouched remainder of the
 * list and one skyline-extraction pass emits the answer progressively.
 *
 * The base list is never mutated by queries, so any number of queries may
 * run concurrently against one list. insert_point / delete_point require
 * exclusive access.
 */
#pragma once

#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "skyline.hpp"
#include "types.hpp"

namespace skypref {

/** Members of the template skyline whose rank changes under a query. */
struct AffectedSet {
  IdSet ids;
  std::size_t size() const { return ids.size(); }
};

enum class InsertOutcome { kInserted, kDominated };
enum class DeleteOutcome { kUnknown, kNonMember, kMember };

class SortedSkylineList {
 public:
  struct Entry {
    PointId id;
    Score base_score;
  };

  SortedSkylineList() = default;

  /** Computes SKY(template), sorts it by template score and indexes it. */
  static SortedSkylineList preprocess(const Dataset& data, const Template& tmpl) {
    tmpl.validate(data.schema());
    SortedSkylineList list;
    list.schema_ = data.schema();
    list.tmpl_ = tmpl;
    list.base_ranks_ = rank_of(tmpl, list.schema_);
    list.base_orders_ = expand(tmpl, list.schema_);

    const SkylineResult sky = sfs_full(data, tmpl);  // emission = (score, id) ascending
    list.reserve_rows(sky.emission_order.size());
    for (PointId id : sky.emission_order) {
      const std::size_t row = *data.row_of(id);
      list.push_row(id, score_of(data, row, list.base_ranks_), data.numeric_row(row),
                    data.nominal_row(row));
    }
    list.rebuild_indexes();
    return list;
  }

  const Schema& schema() const { return schema_; }
  const Template& base_preference() const { return tmpl_; }
  const RankAssignment& base_ranks() const { return base_ranks_; }
  std::size_t size() const { return ids_.size(); }

  Entry entry(std::size_t i) const { return {ids_[i], scores_[i]}; }
  ValueId nominal_entry(std::size_t i, std::size_t d) const {
    return nominal_[i * schema_.nominal_count() + d];
  }

  /** The member ids (the set S), ascending. */
  const IdSet& members() const { return members_; }
  bool contains(PointId id) const { return pos_.count(id) != 0; }

  /** Members holding value v on dimension d, ascending by id. */
  const std::vector<PointId>& holders(std::size_t d, ValueId v) const {
    return inverted_[d][v];
  }

  /**
   * Members whose rank on some dimension differs between the template
   * ranking and the query ranking (union of inverted-index lookups).
   */
  AffectedSet affected(const ImplicitPreference& pref) const {
    const RankAssignment q_ranks = rank_of(pref, schema_);
    AffectedSet out;
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d) {
      for (ValueId v = 0; v < schema_.cardinality(d); ++v) {
        if (q_ranks.rank(d, v) != base_ranks_.rank(d, v))
          out.ids = set_union(out.ids, inverted_[d][v]);
      }
    }
    return out;
  }

  /**
   * Answers a query that refines the template. Result set equals the
   * brute-force skyline of the whole dataset under the query; emission
   * ascends by query score and is final (progressive).
   */
  SkylineResult adaptive_query(const ImplicitPreference& pref, QueryStats* stats = nullptr,
                               const EmitFn& emit = {}) const {
    if (!validate_query(schema_, tmpl_, pref))
      throw DataError("query preference does not refine the template");
    return rerank_skyline(pref, stats, emit, false);
  }

  /** Reference extraction: every accepted member is checked against all
   *  earlier accepted members (no affected-set pruning). */
  SkylineResult adaptive_query_plain(const ImplicitPreference& pref,
                                     QueryStats* stats = nullptr) const {
    if (!validate_query(schema_, tmpl_, pref))
      throw DataError("query preference does not refine the template");
    return rerank_skyline(pref, stats, {}, true);
  }

  /**
   * Skyline of the member set under an arbitrary re-ranking preference.
   * Contract: each per-dimension list is either the template's list, a
   * single value, or an extension of the template's list; within the
   * member set every new dominance then comes from a point holding a
   * strictly up-ranked value, which is what the fast extraction assumes.
   */
  SkylineResult rerank_skyline(const ImplicitPreference& pref, QueryStats* stats,
                               const EmitFn& emit, bool plain) const {
    const RankAssignment q_ranks = rank_of(pref, schema_);
    const BinaryOrderSet q_orders = expand(pref, schema_);
    const std::size_t n = ids_.size();
    const std::size_t md = schema_.nominal_count();

    // entries holding a re-ranked value get a new score and position
    std::vector<char> is_affected(n, 0);
    std::vector<std::uint32_t> aff;
    for (std::size_t d = 0; d < md; ++d) {
      for (ValueId v = 0; v < schema_.cardinality(d); ++v) {
        if (q_ranks.rank(d, v) == base_ranks_.rank(d, v)) continue;
        for (PointId id : inverted_[d][v]) {
          const std::uint32_t p = pos_.at(id);
          if (!is_affected[p]) {
            is_affected[p] = 1;
            aff.push_back(p);
          }
        }
      }
    }

    struct Overlay {
      Score s;
      PointId id;
      std::uint32_t pos;
      bool up;  // holds a value ranked strictly better than under the template
    };
    std::vector<Overlay> overlay;
    overlay.reserve(aff.size());
    for (std::uint32_t p : aff) {
      Score s = scores_[p];
      bool up = false;
      for (std::size_t d = 0; d < md; ++d) {
        const ValueId v = nominal_[p * md + d];
        const std::uint32_t rq = q_ranks.rank(d, v);
        const std::uint32_t rb = base_ranks_.rank(d, v);
        s += static_cast<Score>(rq) - static_cast<Score>(rb);
        up = up || rq < rb;
      }
      overlay.push_back({s, ids_[p], p, up});
    }
    std::sort(overlay.begin(), overlay.end(), [](const Overlay& a, const Overlay& b) {
      if (a.s != b.s) return a.s < b.s;
      return a.id < b.id;
    });
    if (stats) stats->rescored += overlay.size();

    SkylineResult out;
    out.emission_order.reserve(n);
    std::vector<std::uint32_t> dominators;  // accepted entries that may dominate
    std::vector<std::uint32_t> accepted;    // all accepted entries (plain mode)

    std::size_t i = 0, j = 0;
    while (i < n && is_affected[i]) ++i;
    while (i < n || j < overlay.size()) {
      std::uint32_t p;
      bool up = false;
      bool take_overlay;
      if (i >= n)
        take_overlay = true;
      else if (j >= overlay.size())
        take_overlay = false;
      else
        take_overlay = overlay[j].s < scores_[i] ||
                       (overlay[j].s == scores_[i] && overlay[j].id < ids_[i]);
      if (take_overlay) {
        p = overlay[j].pos;
        up = overlay[j].up;
        ++j;
      } else {
        p = static_cast<std::uint32_t>(i);
        ++i;
        while (i < n && is_affected[i]) ++i;
      }

      bool dominated = false;
      const auto& pool = plain ? accepted : dominators;
      for (std::uint32_t q : pool) {
        if (stats) ++stats->comparisons;
        if (entry_dominates(q, p, q_orders)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) {
        out.emission_order.push_back(ids_[p]);
        if (emit) emit(ids_[p]);
        accepted.push_back(p);
        if (up) dominators.push_back(p);
      }
    }
    out.members = out.emission_order;
    std::sort(out.members.begin(), out.members.end());
    return out;
  }

  /**
   * Adds a point to the dataset and maintains the list: a point dominated
   * by a member leaves the list untouched; otherwise it is inserted at its
   * score position and members it dominates are removed.
   */
  InsertOutcome insert_point(Dataset& data, const Point& p) {
    data.append(p);  // rejects duplicate ids and schema violations
    const std::size_t row = *data.row_of(p.id);
    const Score s = score_of(data, row, base_ranks_);
    const auto pn = data.numeric_row(row);
    const auto pv = data.nominal_row(row);

    // only members with a strictly smaller score can dominate the new point
    for (std::size_t i = 0; i < ids_.size() && scores_[i] < s; ++i) {
      if (entry_dominates_row(i, pn, pv)) return InsertOutcome::kDominated;
    }

    // drop members the new point dominates (their scores are strictly larger)
    const std::size_t at = insert_position(s, p.id);
    for (std::size_t i = ids_.size(); i-- > at;) {
      if (row_dominates_entry(pn, pv, i)) erase_entry(i);
    }
    insert_entry(at, p.id, s, pn, pv);
    return InsertOutcome::kInserted;
  }

  /**
   * Removes a point from the dataset and maintains the list. Deleting a
   * member promotes the points that only it dominated; candidates are
   * re-checked against the surviving members in ascending score order.
   */
  DeleteOutcome delete_point(Dataset& data, PointId id) {
    const auto row = data.row_of(id);
    if (!row) return DeleteOutcome::kUnknown;
    const auto it = pos_.find(id);
    if (it == pos_.end()) {
      data.remove(id);
      return DeleteOutcome::kNonMember;
    }

    const std::size_t md = schema_.nominal_count();
    const std::size_t m = schema_.numeric_count();
    std::vector<double> del_num(numeric_.begin() + it->second * m,
                                numeric_.begin() + (it->second + 1) * m);
    std::vector<ValueId> del_nom(nominal_.begin() + it->second * md,
                                 nominal_.begin() + (it->second + 1) * md);
    erase_entry(it->second);
    data.remove(id);

    // candidate promotions: points the deleted member dominated
    struct Cand {
      Score s;
      PointId id;
      std::size_t row;
    };
    std::vector<Cand> cands;
    for (std::size_t r = 0; r < data.size(); ++r) {
      if (dominates(del_num, del_nom, data.numeric_row(r), data.nominal_row(r), base_orders_))
        cands.push_back({score_of(data, r, base_ranks_), data.id(r), r});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.s != b.s) return a.s < b.s;
      return a.id < b.id;
    });
    for (const Cand& c : cands) {
      const auto cn = data.numeric_row(c.row);
      const auto cv = data.nominal_row(c.row);
      bool dominated = false;
      for (std::size_t i = 0; i < ids_.size() && scores_[i] < c.s; ++i) {
        if (entry_dominates_row(i, cn, cv)) {
          dominated = true;
          break;
        }
      }
      if (!dominated) insert_entry(insert_position(c.s, c.id), c.id, c.s, cn, cv);
    }
    return DeleteOutcome::kMember;
  }

  // --- snapshot ---------------------------------------------------------

  void save(std::ostream& os) const {
    os << "skypref-list v1\n";
    os << "schema " << std::hex << schema_hash(schema_) << std::dec << "\n";
    os << "template " << schema_.nominal_count() << "\n";
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d) {
      os << tmpl_.list(d).size();
      for (ValueId v : tmpl_.list(d)) os << ' ' << v;
      os << "\n";
    }
    os << "entries " << ids_.size() << "\n";
    os << std::hexfloat;
    for (std::size_t i = 0; i < ids_.size(); ++i) os << ids_[i] << ' ' << scores_[i] << "\n";
    os << std::defaultfloat;
    os << "inverted\n";
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d) {
      for (ValueId v = 0; v < schema_.cardinality(d); ++v) {
        os << d << ' ' << v << ' ' << inverted_[d][v].size();
        for (PointId id : inverted_[d][v]) os << ' ' << id;
        os << "\n";
      }
    }
    os << "end\n";
  }

  static SortedSkylineList load(std::istream& is, const Dataset& data) {
    std::string tok;
    auto expect = [&](const char* want) {
      if (!(is >> tok) || tok != want) throw ParseError(std::string("expected '") + want + "' in list snapshot");
    };
    expect("skypref-list");
    expect("v1");
    expect("schema");
    std::uint64_t hash = 0;
    is >> std::hex >> hash >> std::dec;
    if (hash != schema_hash(data.schema()))
      throw DataError("list snapshot does not match the dataset schema");

    SortedSkylineList list;
    list.schema_ = data.schema();
    expect("template");
    std::size_t md = 0;
    is >> md;
    if (md != list.schema_.nominal_count()) throw ParseError("bad template arity in list snapshot");
    list.tmpl_ = Template::for_schema(list.schema_);
    for (std::size_t d = 0; d < md; ++d) {
      std::size_t len = 0;
      is >> len;
      std::vector<ValueId> vals(len);
      for (auto& v : vals) is >> v;
      list.tmpl_.set_list(list.schema_, d, std::move(vals));
    }
    list.base_ranks_ = rank_of(list.tmpl_, list.schema_);
    list.base_orders_ = expand(list.tmpl_, list.schema_);

    expect("entries");
    std::size_t n = 0;
    is >> n;
    list.reserve_rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      PointId id;
      std::string sc;
      if (!(is >> id >> sc)) throw ParseError("truncated entry in list snapshot");
      const Score s = std::strtod(sc.c_str(), nullptr);
      const auto row = data.row_of(id);
      if (!row) throw DataError("snapshot member " + std::to_string(id) + " missing from dataset");
      if (score_of(data, *row, list.base_ranks_) != s)
        throw DataError("snapshot score mismatch for member " + std::to_string(id));
      list.push_row(id, s, data.numeric_row(*row), data.nominal_row(*row));
    }
    expect("inverted");
    list.rebuild_indexes();
    // consume and cross-check the stored index
    for (std::size_t d = 0; d < md; ++d) {
      for (ValueId v = 0; v < list.schema_.cardinality(d); ++v) {
        std::size_t dd, vv, cnt;
        if (!(is >> dd >> vv >> cnt)) throw ParseError("truncated inverted index in list snapshot");
        if (dd != d || vv != v || cnt != list.inverted_[d][v].size())
          throw DataError("inverted index mismatch in list snapshot");
        for (std::size_t k = 0; k < cnt; ++k) {
          PointId id;
          is >> id;
          if (id != list.inverted_[d][v][k]) throw DataError("inverted index mismatch in list snapshot");
        }
      }
    }
    expect("end");
    return list;
  }

  std::uint64_t storage_bytes() const {
    std::ostringstream os;
    save(os);
    return static_cast<std::uint64_t>(os.str().size());
  }

 private:
  void reserve_rows(std::size_t n) {
    ids_.reserve(n);
    scores_.reserve(n);
    numeric_.reserve(n * schema_.numeric_count());
    nominal_.reserve(n * schema_.nominal_count());
  }

  void push_row(PointId id, Score s, std::span<const double> nums, std::span<const ValueId> noms) {
    ids_.push_back(id);
    scores_.push_back(s);
    numeric_.insert(numeric_.end(), nums.begin(), nums.end());
    nominal_.insert(nominal_.end(), noms.begin(), noms.end());
  }

  void rebuild_indexes() {
    pos_.clear();
    for (std::size_t i = 0; i < ids_.size(); ++i) pos_[ids_[i]] = static_cast<std::uint32_t>(i);
    members_ = ids_;
    std::sort(members_.begin(), members_.end());
    inverted_.assign(schema_.nominal_count(), {});
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d) {
      inverted_[d].assign(schema_.cardinality(d), {});
      for (std::size_t i = 0; i < ids_.size(); ++i)
        inverted_[d][nominal_[i * schema_.nominal_count() + d]].push_back(ids_[i]);
      for (auto& lst : inverted_[d]) std::sort(lst.begin(), lst.end());
    }
  }

  std::size_t insert_position(Score s, PointId id) const {
    std::size_t lo = 0, hi = ids_.size();
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (scores_[mid] < s || (scores_[mid] == s && ids_[mid] < id))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  void insert_entry(std::size_t at, PointId id, Score s, std::span<const double> nums,
                    std::span<const ValueId> noms) {
    const std::size_t m = schema_.numeric_count();
    const std::size_t md = schema_.nominal_count();
    ids_.insert(ids_.begin() + at, id);
    scores_.insert(scores_.begin() + at, s);
    numeric_.insert(numeric_.begin() + at * m, nums.begin(), nums.end());
    nominal_.insert(nominal_.begin() + at * md, noms.begin(), noms.end());
    for (std::size_t i = at; i < ids_.size(); ++i) pos_[ids_[i]] = static_cast<std::uint32_t>(i);
    members_.insert(std::lower_bound(members_.begin(), members_.end(), id), id);
    for (std::size_t d = 0; d < md; ++d) {
      auto& lst = inverted_[d][noms[d]];
      lst.insert(std::lower_bound(lst.begin(), lst.end(), id), id);
    }
  }

  void erase_entry(std::size_t at) {
    const std::size_t m = schema_.numeric_count();
    const std::size_t md = schema_.nominal_count();
    const PointId id = ids_[at];
    for (std::size_t d = 0; d < md; ++d) {
      auto& lst = inverted_[d][nominal_[at * md + d]];
      lst.erase(std::lower_bound(lst.begin(), lst.end(), id));
    }
    members_.erase(std::lower_bound(members_.begin(), members_.end(), id));
    pos_.erase(id);
    ids_.erase(ids_.begin() + at);
    scores_.erase(scores_.begin() + at);
    numeric_.erase(numeric_.begin() + at * m, numeric_.begin() + (at + 1) * m);
    nominal_.erase(nominal_.begin() + at * md, nominal_.begin() + (at + 1) * md);
    for (std::size_t i = at; i < ids_.size(); ++i) pos_[ids_[i]] = static_cast<std::uint32_t>(i);
  }

  bool entry_dominates(std::size_t a, std::size_t b, const BinaryOrderSet& orders) const {
    const std::size_t m = schema_.numeric_count();
    const std::size_t md = schema_.nominal_count();
    return dominates({numeric_.data() + a * m, m}, {nominal_.data() + a * md, md},
                     {numeric_.data() + b * m, m}, {nominal_.data() + b * md, md}, orders);
  }

  bool entry_dominates_row(std::size_t a, std::span<const double> bn,
                           std::span<const ValueId> bv) const {
    const std::size_t m = schema_.numeric_count();
    const std::size_t md = schema_.nominal_count();
    return dominates({numeric_.data() + a * m, m}, {nominal_.data() + a * md, md}, bn, bv,
                     base_orders_);
  }

  bool row_dominates_entry(std::span<const double> an, std::span<const ValueId> av,
                           std::size_t b) const {
    const std::size_t m = schema_.numeric_count();
    const std::size_t md = schema_.nominal_count();
    return dominates(an, av, {numeric_.data() + b * m, m}, {nominal_.data() + b * md, md},
                     base_orders_);
  }

  Schema schema_;
  Template tmpl_;
  RankAssignment base_ranks_;
  BinaryOrderSet base_orders_;

  // entry-order arrays, ascending (base score, id)
  std::vector<PointId> ids_;
  std::vector<Score> scores_;
  std::vector<double> numeric_;
  std::vector<ValueId> nominal_;

  std::unordered_map<PointId, std::uint32_t> pos_;          // id -> entry index
  std::vector<std::vector<std::vector<PointId>>> inverted_;  // [dim][value] -> ids
  IdSet members_;                                            // ascending ids (the set S)
};

/** Convenience wrapper matching the module-level operation name. */
inline SortedSkylineList preprocess(const Dataset& data, const Template& tmpl) {
  return SortedSkylineList::preprocess(data, tmpl);
}

}  // namespace skypref
