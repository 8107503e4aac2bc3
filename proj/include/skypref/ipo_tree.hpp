/**
 * IPO-tree: partial materialization of skylines for combinations of
 * first-order preferences ("v < *"), one tree level per nominal dimension.
 *
 * The root stores the template skyline S. Every value-labeled node stores
 * the set of S-members disqualified under its path preference, as a bitmap
 * over S (bit i = i-th member of S in ascending id order); the special
 * phi child means "no preference on this dimension" and stores nothing.
 * A query of any order is answered by walking the listed values per
 * dimension and folding the per-branch skylines pairwise: each fold keeps
 * the intersection plus the points whose value on the folded dimension
 * lies in the already-processed prefix. The tree may be restricted to the
 * most popular values per dimension; queries touching an unmaterialized
 * value raise NotMaterializedError so callers can fall back to adaptive
 * SFS.
 *
 * After build the tree is immutable and safe for concurrent queries.
 * Dataset updates invalidate it (rebuild required).
 */
#pragma once

#include <algorithm>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "adaptive_sfs.hpp"
#include "bitset.hpp"
#include "core.hpp"
#include "skyline.hpp"
#include "types.hpp"

namespace skypref {

/**
 * One pairwise application of the merging identity: given the skyline for
 * "v1 < ... < v_{x-1} < *" (sky1) and the skyline for "v_x < *" (sky2) on
 * the same dimension, the skyline for the combined x-th order preference
 * is (sky1 ∩ sky2) ∪ {p ∈ sky1 : p's value on dim is one of v1..v_{x-1}}.
 */
inline IdSet merge_pair(const IdSet& sky1, const IdSet& sky2, std::size_t dim,
                        const std::vector<ValueId>& prefix, const Dataset& data) {
  IdSet out = set_intersect(sky1, sky2);
  IdSet psky;
  for (PointId id : sky1) {
    const auto row = data.row_of(id);
    if (!row) throw DataError("merge_pair: unknown point id " + std::to_string(id));
    const ValueId v = data.nominal(*row, dim);
    if (std::find(prefix.begin(), prefix.end(), v) != prefix.end()) psky.push_back(id);
  }
  return set_union(out, psky);
}

struct IpoNode {
  DynamicBitset disqualified;                    // over S; empty for root and phi nodes
  std::vector<std::unique_ptr<IpoNode>> kids;    // materialized values (ascending), then phi
};

class IpoTree {
 public:
  /** Optional per-dimension set of materialized values ("top-k popular"). */
  using Restriction = std::vector<std::vector<ValueId>>;

  IpoTree() = default;

  static IpoTree build(const Dataset& data, const Template& tmpl,
                       const std::optional<Restriction>& restriction = std::nullopt) {
    tmpl.validate(data.schema());
    IpoTree tree;
    tree.schema_ = data.schema();
    tree.tmpl_ = tmpl;

    const SortedSkylineList list = SortedSkylineList::preprocess(data, tmpl);
    tree.s_ids_ = list.members();

    const std::size_t md = tree.schema_.nominal_count();
    tree.mat_vals_.resize(md);
    for (std::size_t d = 0; d < md; ++d) {
      if (restriction) {
        if (restriction->size() != md) throw SchemaError("restriction arity mismatch");
        tree.mat_vals_[d] = (*restriction)[d];
        std::sort(tree.mat_vals_[d].begin(), tree.mat_vals_[d].end());
        for (ValueId v : tree.mat_vals_[d])
          if (v >= tree.schema_.cardinality(d))
            throw SchemaError("restriction value out of range");
      } else {
        tree.mat_vals_[d].resize(tree.schema_.cardinality(d));
        for (ValueId v = 0; v < tree.schema_.cardinality(d); ++v) tree.mat_vals_[d][v] = v;
      }
    }

    tree.build_value_bitmaps(list);
    tree.root_ = std::make_unique<IpoNode>();
    tree.root_->disqualified = DynamicBitset(tree.s_ids_.size());
    Template path = tmpl;
    tree.build_children(list, 0, *tree.root_, path);
    return tree;
  }

  const Schema& schema() const { return schema_; }
  const Template& base_preference() const { return tmpl_; }

  /** The template skyline S, ascending by id. */
  const IdSet& root_skyline() const { return s_ids_; }

  const std::vector<std::vector<ValueId>>& materialized_values() const { return mat_vals_; }

  /** Tree depth in levels (root counts as one). */
  std::size_t depth() const { return schema_.nominal_count() + 1; }

  std::size_t node_count() const { return root_ ? count_nodes(*root_) : 0; }

  /** True iff every value listed in the preference is materialized. */
  bool covers(const ImplicitPreference& pref) const {
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d)
      for (ValueId v : pref.list(d))
        if (!std::binary_search(mat_vals_[d].begin(), mat_vals_[d].end(), v)) return false;
    return true;
  }

  /**
   * Answers a template-refining query by per-dimension descent and
   * pairwise fold-merging. Emission ascends by point id.
   */
  SkylineResult query(const ImplicitPreference& pref, QueryStats* stats = nullptr) const {
    check_query(pref);
    DynamicBitset bits = query_bits(pref, stats);
    SkylineResult out;
    out.members.reserve(bits.count());
    bits.for_each_set([&](std::size_t i) { out.members.push_back(s_ids_[i]); });
    out.emission_order = out.members;
    return out;
  }

  /**
   * Alternative evaluation strategy: accumulates the disqualified set D so
   * that S - D equals query(). Returned ascending by id.
   */
  IdSet query_disqualified(const ImplicitPreference& pref, QueryStats* stats = nullptr) const {
    check_query(pref);
    const DynamicBitset none(s_ids_.size());
    DynamicBitset acc = accumulate_disqualified(pref, 0, *root_, none, stats);
    IdSet out;
    out.reserve(acc.count());
    acc.for_each_set([&](std::size_t i) { out.push_back(s_ids_[i]); });
    return out;
  }

  /** Node lookup by path labels (one entry per level; nullopt = phi). */
  const IpoNode* node_at(const std::vector<std::optional<ValueId>>& labels) const {
    const IpoNode* n = root_.get();
    for (std::size_t d = 0; d < labels.size(); ++d) {
      if (!n || d >= schema_.nominal_count()) return nullptr;
      if (labels[d]) {
        const auto it =
            std::lower_bound(mat_vals_[d].begin(), mat_vals_[d].end(), *labels[d]);
        if (it == mat_vals_[d].end() || *it != *labels[d]) return nullptr;
        n = n->kids[static_cast<std::size_t>(it - mat_vals_[d].begin())].get();
      } else {
        n = n->kids.back().get();
      }
    }
    return n;
  }

  /** Disqualified set of the node at the given path, ascending by id. */
  IdSet disqualified_at(const std::vector<std::optional<ValueId>>& labels) const {
    const IpoNode* n = node_at(labels);
    if (!n) throw DataError("no such IPO-tree node");
    IdSet out;
    n->disqualified.for_each_set([&](std::size_t i) { out.push_back(s_ids_[i]); });
    return out;
  }

  // --- snapshot ---------------------------------------------------------

  void save(std::ostream& os) const {
    os << "skypref-ipo v1\n";
    os << "schema " << std::hex << schema_hash(schema_) << std::dec << "\n";
    os << "template " << schema_.nominal_count() << "\n";
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d) {
      os << tmpl_.list(d).size();
      for (ValueId v : tmpl_.list(d)) os << ' ' << v;
      os << "\n";
    }
    os << "restriction " << mat_vals_.size() << "\n";
    for (const auto& vals : mat_vals_) {
      os << vals.size();
      for (ValueId v : vals) os << ' ' << v;
      os << "\n";
    }
    os << "skyline " << s_ids_.size() << "\n";
    for (std::size_t i = 0; i < s_ids_.size(); ++i) os << (i ? " " : "") << s_ids_[i];
    os << "\n";
    os << "values\n";
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d)
      for (ValueId v = 0; v < schema_.cardinality(d); ++v)
        write_bitmap_line(os, std::to_string(d) + " " + std::to_string(v), value_bits_[d][v]);
    os << "nodes " << node_count() << "\n";
    // level order; children emitted value-ascending then phi
    std::vector<std::pair<const IpoNode*, std::size_t>> queue{{root_.get(), 0}};
    write_bitmap_line(os, "r", root_->disqualified);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const auto [node, d] = queue[qi];
      if (d >= schema_.nominal_count()) continue;
      for (std::size_t k = 0; k < node->kids.size(); ++k) {
        const bool phi = (k + 1 == node->kids.size());
        write_bitmap_line(os, phi ? "p" : std::to_string(mat_vals_[d][k]),
                          node->kids[k]->disqualified);
        queue.push_back({node->kids[k].get(), d + 1});
      }
    }
    os << "end\n";
  }

  static IpoTree load(std::istream& is, const Schema& schema) {
    std::string tok;
    auto expect = [&](const char* want) {
      if (!(is >> tok) || tok != want)
        throw ParseError(std::string("expected '") + want + "' in tree snapshot");
    };
    expect("skypref-ipo");
    expect("v1");
    expect("schema");
    std::uint64_t hash = 0;
    is >> std::hex >> hash >> std::dec;
    if (hash != schema_hash(schema)) throw DataError("tree snapshot does not match the schema");

    IpoTree tree;
    tree.schema_ = schema;
    const std::size_t md = schema.nominal_count();
    expect("template");
    std::size_t n = 0;
    is >> n;
    if (n != md) throw ParseError("bad template arity in tree snapshot");
    tree.tmpl_ = Template::for_schema(schema);
    for (std::size_t d = 0; d < md; ++d) {
      std::size_t len = 0;
      is >> len;
      std::vector<ValueId> vals(len);
      for (auto& v : vals) is >> v;
      tree.tmpl_.set_list(schema, d, std::move(vals));
    }
    expect("restriction");
    is >> n;
    if (n != md) throw ParseError("bad restriction arity in tree snapshot");
    tree.mat_vals_.resize(md);
    for (std::size_t d = 0; d < md; ++d) {
      std::size_t len = 0;
      is >> len;
      tree.mat_vals_[d].resize(len);
      for (auto& v : tree.mat_vals_[d]) is >> v;
    }
    expect("skyline");
    is >> n;
    tree.s_ids_.resize(n);
    for (auto& id : tree.s_ids_) is >> id;
    expect("values");
    tree.value_bits_.resize(md);
    for (std::size_t d = 0; d < md; ++d) {
      tree.value_bits_[d].resize(schema.cardinality(d));
      for (ValueId v = 0; v < schema.cardinality(d); ++v) {
        std::size_t dd, vv;
        is >> dd >> vv;
        if (dd != d || vv != v) throw ParseError("value bitmap order mismatch in tree snapshot");
        tree.value_bits_[d][v] = read_bitmap(is, n);
      }
    }
    expect("nodes");
    std::size_t node_total = 0;
    is >> node_total;
    if (!(is >> tok) || tok != "r") throw ParseError("missing root node in tree snapshot");
    tree.root_ = std::make_unique<IpoNode>();
    tree.root_->disqualified = read_bitmap(is, n);
    std::vector<std::pair<IpoNode*, std::size_t>> queue{{tree.root_.get(), 0}};
    std::size_t seen = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const auto [node, d] = queue[qi];
      if (d >= md) continue;
      for (std::size_t k = 0; k <= tree.mat_vals_[d].size(); ++k) {
        const bool phi = (k == tree.mat_vals_[d].size());
        if (!(is >> tok)) throw ParseError("truncated node list in tree snapshot");
        if (phi != (tok == "p") ||
            (!phi && tok != std::to_string(tree.mat_vals_[d][k])))
          throw ParseError("node label mismatch in tree snapshot");
        auto kid = std::make_unique<IpoNode>();
        kid->disqualified = read_bitmap(is, n);
        queue.push_back({kid.get(), d + 1});
        node->kids.push_back(std::move(kid));
        ++seen;
      }
    }
    if (seen != node_total) throw ParseError("node count mismatch in tree snapshot");
    expect("end");
    return tree;
  }

  std::uint64_t storage_bytes() const {
    std::ostringstream os;
    save(os);
    return static_cast<std::uint64_t>(os.str().size());
  }

 private:
  void check_query(const ImplicitPreference& pref) const {
    if (!validate_query(schema_, tmpl_, pref))
      throw DataError("query preference does not refine the template");
    for (std::size_t d = 0; d < schema_.nominal_count(); ++d)
      for (ValueId v : pref.list(d))
        if (!std::binary_search(mat_vals_[d].begin(), mat_vals_[d].end(), v))
          throw NotMaterializedError("value '" + schema_.value_label(d, v) +
                                     "' is not materialized in the IPO-tree");
  }

  void build_value_bitmaps(const SortedSkylineList& list) {
    const std::size_t md = schema_.nominal_count();
    value_bits_.resize(md);
    for (std::size_t d = 0; d < md; ++d) {
      value_bits_[d].assign(schema_.cardinality(d), DynamicBitset(s_ids_.size()));
      for (ValueId v = 0; v < schema_.cardinality(d); ++v)
        for (PointId id : list.holders(d, v)) value_bits_[d][v].set(s_index(id));
    }
  }

  void build_children(const SortedSkylineList& list, std::size_t d, IpoNode& node,
                      Template& path) {
    if (d >= schema_.nominal_count()) return;
    const std::vector<ValueId> saved = path.list(d);
    for (ValueId v : mat_vals_[d]) {
      auto kid = std::make_unique<IpoNode>();
      path.set_list(schema_, d, {v});
      const SkylineResult sky = list.rerank_skyline(path, nullptr, {}, false);
      DynamicBitset disq = DynamicBitset::all_set(s_ids_.size());
      for (PointId id : sky.members) disq.reset(s_index(id));
      kid->disqualified = std::move(disq);
      build_children(list, d + 1, *kid, path);
      node.kids.push_back(std::move(kid));
    }
    path.set_list(schema_, d, saved);
    auto phi = std::make_unique<IpoNode>();
    phi->disqualified = DynamicBitset(s_ids_.size());
    build_children(list, d + 1, *phi, path);
    node.kids.push_back(std::move(phi));
  }

  std::size_t s_index(PointId id) const {
    return static_cast<std::size_t>(
        std::lower_bound(s_ids_.begin(), s_ids_.end(), id) - s_ids_.begin());
  }

  std::size_t kid_index(std::size_t d, ValueId v) const {
    const auto it = std::lower_bound(mat_vals_[d].begin(), mat_vals_[d].end(), v);
    if (it == mat_vals_[d].end() || *it != v)
      throw NotMaterializedError("value not materialized in the IPO-tree");
    return static_cast<std::size_t>(it - mat_vals_[d].begin());
  }

  DynamicBitset query_bits(const ImplicitPreference& pref, QueryStats* stats) const {
    return descend(pref, 0, *root_, DynamicBitset::all_set(s_ids_.size()), stats);
  }

  DynamicBitset descend(const ImplicitPreference& pref, std::size_t d, const IpoNode& node,
                        DynamicBitset cand, QueryStats* stats) const {
    if (d >= schema_.nominal_count()) return cand;
    const auto& listed = pref.list(d);
    if (listed.empty()) return descend(pref, d + 1, *node.kids.back(), std::move(cand), stats);

    std::vector<DynamicBitset> parts;
    parts.reserve(listed.size());
    for (ValueId v : listed) {
      const IpoNode& kid = *node.kids[kid_index(d, v)];
      parts.push_back(
          descend(pref, d + 1, kid, and_not(cand, kid.disqualified), stats));
    }
    DynamicBitset x = std::move(parts[0]);
    DynamicBitset prefix(s_ids_.size());
    for (std::size_t i = 1; i < parts.size(); ++i) {
      prefix |= value_bits_[d][listed[i - 1]];
      DynamicBitset kept = x & prefix;  // PSKY of the folded-so-far skyline
      x &= parts[i];
      x |= kept;
      if (stats) ++stats->fold_merges;
    }
    return x;
  }

  DynamicBitset accumulate_disqualified(const ImplicitPreference& pref, std::size_t d,
                                        const IpoNode& node, const DynamicBitset& own,
                                        QueryStats* stats) const {
    if (d >= schema_.nominal_count()) return own;
    const auto& listed = pref.list(d);
    if (listed.empty())
      return accumulate_disqualified(pref, d + 1, *node.kids.back(), own, stats);

    const IpoNode& first = *node.kids[kid_index(d, listed[0])];
    DynamicBitset acc =
        accumulate_disqualified(pref, d + 1, first, first.disqualified, stats);
    DynamicBitset prefix(s_ids_.size());
    for (std::size_t i = 1; i < listed.size(); ++i) {
      const IpoNode& kid = *node.kids[kid_index(d, listed[i])];
      DynamicBitset ai =
          accumulate_disqualified(pref, d + 1, kid, kid.disqualified, stats);
      prefix |= value_bits_[d][listed[i - 1]];
      ai.and_not(prefix);  // points with prefix values stay qualified
      acc |= ai;
      if (stats) ++stats->fold_merges;
    }
    return acc;
  }

  static std::size_t count_nodes(const IpoNode& n) {
    std::size_t c = 1;
    for (const auto& k : n.kids) c += count_nodes(*k);
    return c;
  }

  static void write_bitmap_line(std::ostream& os, const std::string& label,
                                const DynamicBitset& bits) {
    os << label << std::hex;
    for (auto w : bits.words()) os << ' ' << w;
    os << std::dec << "\n";
  }

  static DynamicBitset read_bitmap(std::istream& is, std::size_t nbits) {
    DynamicBitset bits(nbits);
    is >> std::hex;
    for (auto& w : bits.words())
      if (!(is >> w)) throw ParseError("truncated bitmap in tree snapshot");
    is >> std::dec;
    return bits;
  }

  Schema schema_;
  Template tmpl_;
  IdSet s_ids_;                                        // S, ascending ids
  std::vector<std::vector<ValueId>> mat_vals_;         // materialized values per dim
  std::vector<std::vector<DynamicBitset>> value_bits_; // [dim][value] over S
  std::unique_ptr<IpoNode> root_;
};

/** Frequency-based restriction: the k most frequent values per dimension. */
inline IpoTree::Restriction top_k_restriction(const Dataset& data, std::size_t k) {
  IpoTree::Restriction out(data.schema().nominal_count());
  for (std::size_t d = 0; d < data.schema().nominal_count(); ++d) {
    std::vector<std::pair<std::size_t, ValueId>> freq(data.schema().cardinality(d));
    for (ValueId v = 0; v < data.schema().cardinality(d); ++v) freq[v] = {0, v};
    for (std::size_t r = 0; r < data.size(); ++r) ++freq[data.nominal(r, d)].first;
    std::sort(freq.begin(), freq.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t i = 0; i < std::min(k, freq.size()); ++i) out[d].push_back(freq[i].second);
    std::sort(out[d].begin(), out[d].end());
  }
  return out;
}

/**
 * Routes a query to the IPO-tree when all its values are materialized and
 * to adaptive SFS otherwise; the result set is identical either way.
 */
inline SkylineResult query_with_fallback(const IpoTree& tree, const SortedSkylineList& list,
                                         const ImplicitPreference& pref,
                                         QueryStats* stats = nullptr) {
  if (tree.covers(pref)) return tree.query(pref, stats);
  return list.adaptive_query(pref, stats);
}

}  // namespace skypref
