/**
 * skypref command-line front end.
 *
 * Subcommands: gen, skyline, preprocess, build-ipo, query, bench, check.
 * Exit codes: 0 success, 1 usage error, 2 data error, 3 internal assertion.
 */
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skypref/adaptive_sfs.hpp"
#include "skypref/bench.hpp"
#include "skypref/core.hpp"
#include "skypref/datagen.hpp"
#include "skypref/io.hpp"
#include "skypref/ipo_tree.hpp"
#include "skypref/skyline.hpp"

namespace {

using namespace skypref;

std::string default_out_dir() {
  const char* env = std::getenv("SKYPREF_OUT_DIR");
  return env && *env ? std::string(env) : std::string(".");
}

DataKind parse_kind(const std::string& s) {
  if (s == "independent") return DataKind::kIndependent;
  if (s == "correlated") return DataKind::kCorrelated;
  if (s == "anti-correlated") return DataKind::kAntiCorrelated;
  throw DataError("unknown data kind '" + s + "'");
}

Algo parse_algo(const std::string& s) {
  if (s == "sfs-d") return Algo::kSfsD;
  if (s == "sfs-a") return Algo::kSfsA;
  if (s == "ipo-tree") return Algo::kIpoTree;
  if (s == "ipo-tree-k") return Algo::kIpoTreeK;
  throw DataError("unknown algorithm '" + s + "'");
}

struct DataArgs {
  std::string data_path;
  std::string schema_path;

  void attach(CLI::App* cmd, bool required = true) {
    auto* d = cmd->add_option("--data", data_path, "dataset CSV file");
    auto* s = cmd->add_option("--schema", schema_path, "schema sidecar file");
    if (required) {
      d->required();
      s->required();
    }
  }

  Dataset load() const { return load_dataset(data_path, schema_path); }
};

Template resolve_template(const std::string& text, const Dataset& data) {
  if (text == "@freq") return frequency_template(data);
  return parse_pref(text, data.schema());
}

int cmd_gen(const GenConfig& cfg, const std::string& kind, const std::string& out,
            const std::string& schema_out) {
  GenConfig g = cfg;
  g.kind = parse_kind(kind);
  const Dataset data = gen_synthetic(g);
  save_dataset(data, out, schema_out);
  std::cout << "wrote " << data.size() << " points to " << out << " (schema: " << schema_out
            << ")\n";
  return 0;
}

int cmd_skyline(const DataArgs& da, const std::string& algo_name, const std::string& pref_text,
                const std::string& tmpl_text, bool show_stats) {
  const Dataset data = da.load();
  const ImplicitPreference pref = parse_pref(pref_text, data.schema());
  const Template tmpl = resolve_template(tmpl_text, data);
  QueryStats stats;
  const EmitFn emit = [](PointId id) { std::cout << id << "\n"; };

  if (algo_name == "brute") {
    const auto res = brute_force_skyline(data, expand(pref, data.schema()), &stats);
    for (PointId id : res.members) std::cout << id << "\n";
  } else if (algo_name == "sfs-d") {
    (void)sfs_full(data, pref, &stats, emit);
  } else if (algo_name == "sfs-a") {
    const auto list = SortedSkylineList::preprocess(data, tmpl);
    (void)list.adaptive_query(pref, &stats, emit);
  } else if (algo_name == "ipo") {
    const auto tree = IpoTree::build(data, tmpl);
    const auto res = tree.query(pref, &stats);
    for (PointId id : res.members) std::cout << id << "\n";
  } else {
    throw DataError("unknown algorithm '" + algo_name + "' (brute|sfs-d|sfs-a|ipo)");
  }
  if (show_stats)
    std::cerr << "comparisons=" << stats.comparisons << " rescored=" << stats.rescored
              << " fold_merges=" << stats.fold_merges << "\n";
  return 0;
}

int cmd_preprocess(const DataArgs& da, const std::string& tmpl_text, const std::string& out) {
  const Dataset data = da.load();
  const Template tmpl = resolve_template(tmpl_text, data);
  const auto list = SortedSkylineList::preprocess(data, tmpl);
  std::ofstream os(out);
  if (!os) throw DataError("cannot write snapshot: " + out);
  list.save(os);
  std::cout << "skyline size " << list.size() << ", snapshot " << list.storage_bytes()
            << " bytes -> " << out << "\n";
  return 0;
}

int cmd_build_ipo(const DataArgs& da, const std::string& tmpl_text, std::size_t topk,
                  const std::string& out) {
  const Dataset data = da.load();
  const Template tmpl = resolve_template(tmpl_text, data);
  std::optional<IpoTree::Restriction> restriction;
  if (topk > 0) restriction = top_k_restriction(data, topk);
  const auto tree = IpoTree::build(data, tmpl, restriction);
  std::ofstream os(out);
  if (!os) throw DataError("cannot write snapshot: " + out);
  tree.save(os);
  std::cout << "root skyline " << tree.root_skyline().size() << ", " << tree.node_count()
            << " nodes, snapshot " << tree.storage_bytes() << " bytes -> " << out << "\n";
  return 0;
}

int cmd_query(const DataArgs& da, const std::string& tree_path, const std::string& list_path,
              const std::string& pref_text) {
  const Dataset data = da.load();
  const ImplicitPreference pref = parse_pref(pref_text, data.schema());

  std::optional<IpoTree> tree;
  std::optional<SortedSkylineList> list;
  if (!tree_path.empty()) {
    std::ifstream is(tree_path);
    if (!is) throw DataError("cannot open snapshot: " + tree_path);
    tree = IpoTree::load(is, data.schema());
  }
  if (!list_path.empty()) {
    std::ifstream is(list_path);
    if (!is) throw DataError("cannot open snapshot: " + list_path);
    list = SortedSkylineList::load(is, data);
  }
  if (!tree && !list) throw DataError("provide --tree and/or --list snapshots");

  SkylineResult res;
  if (tree && list)
    res = query_with_fallback(*tree, *list, pref);
  else if (tree)
    res = tree->query(pref);
  else
    res = list->adaptive_query(pref);
  for (PointId id : res.members) std::cout << id << "\n";
  return 0;
}

struct BenchArgs {
  DataArgs data;
  GenConfig gen;
  std::string kind = "anti-correlated";
  std::string tmpl_text = "@freq";
  std::vector<std::string> algos = {"sfs-d", "sfs-a", "ipo-tree"};
  std::uint32_t order = 3;
  std::size_t queries = 100;
  std::size_t reps = 100;
  std::size_t topk = 10;
  std::uint64_t seed = 1;
  std::string out;
  bool verify = false;
};

int cmd_bench(const BenchArgs& a) {
  Dataset data;
  BenchConfig cfg;
  if (!a.data.data_path.empty()) {
    data = a.data.load();
    cfg.kind_label = "file";
    cfg.zipf_theta = 0.0;
  } else {
    GenConfig g = a.gen;
    g.kind = parse_kind(a.kind);
    data = gen_synthetic(g);
    cfg.kind_label = a.kind;
    cfg.zipf_theta = g.zipf_theta;
  }
  cfg.tmpl = resolve_template(a.tmpl_text, data);
  cfg.algos.clear();
  for (const auto& s : a.algos) cfg.algos.push_back(parse_algo(s));
  cfg.order = a.order;
  cfg.queries = a.queries;
  cfg.reps = a.reps;
  cfg.topk = a.topk;
  cfg.seed = a.seed;
  cfg.verify = a.verify;

  const std::string out = a.out.empty() ? default_out_dir() + "/metrics.csv" : a.out;
  std::ofstream os(out);
  if (!os) throw DataError("cannot write metrics CSV: " + out);
  const auto rows = run_bench(cfg, data, &os);
  write_metrics_header(std::cout);
  for (const auto& r : rows) write_metrics_row(std::cout, r);
  std::cerr << "metrics -> " << out << "\n";
  return 0;
}

int cmd_check(const DataArgs& da, std::size_t n, std::uint32_t cardinality, std::size_t queries,
              std::uint64_t seed, std::size_t sample) {
  Dataset data;
  if (!da.data_path.empty()) {
    Dataset full = da.load();
    if (full.size() > sample) {
      // seeded sample without replacement, oracle cost is quadratic
      Rng rng(seed);
      std::vector<std::size_t> rows(full.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      for (std::size_t i = 0; i < sample; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(rows.size() - i));
        std::swap(rows[i], rows[j]);
      }
      Dataset sub(full.schema());
      for (std::size_t i = 0; i < sample; ++i) {
        Point p;
        p.id = full.id(rows[i]);
        for (std::size_t k = 0; k < full.schema().numeric_count(); ++k)
          p.numeric.push_back(full.raw_numeric(rows[i], k));
        for (std::size_t d = 0; d < full.schema().nominal_count(); ++d)
          p.nominal.push_back(full.nominal(rows[i], d));
        sub.append(p);
      }
      data = std::move(sub);
    } else {
      data = std::move(full);
    }
  } else {
    GenConfig g;
    g.kind = DataKind::kIndependent;
    g.n_tuples = n;
    g.n_numeric = 2;
    g.n_nominal = 2;
    g.cardinality = cardinality;
    g.zipf_theta = 1.0;
    g.seed = seed;
    data = gen_synthetic(g);
  }

  const Schema& schema = data.schema();
  Rng rng(seed ^ 0xabcdef12345ULL);
  std::size_t ran = 0;
  for (std::size_t q = 0; q < queries; ++q) {
    // random template: a short random list per dimension
    Template tmpl = Template::for_schema(schema);
    for (std::size_t d = 0; d < schema.nominal_count(); ++d) {
      const std::uint32_t c = schema.cardinality(d);
      const std::uint32_t len = static_cast<std::uint32_t>(rng.below(2));
      std::vector<ValueId> list;
      while (list.size() < len) {
        const ValueId v = static_cast<ValueId>(rng.below(c));
        if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
      }
      tmpl.set_list(schema, d, std::move(list));
    }
    std::uint32_t min_card = schema.nominal_count() ? ~0u : 1;
    for (std::size_t d = 0; d < schema.nominal_count(); ++d)
      min_card = std::min(min_card, schema.cardinality(d));
    const std::uint32_t order = 1 + static_cast<std::uint32_t>(rng.below(min_card));
    const ImplicitPreference pref = random_pref(schema, order, tmpl, rng);

    const SkylineResult oracle = brute_force_skyline(data, expand(pref, schema));
    const SkylineResult full = sfs_full(data, pref);
    const SortedSkylineList list = SortedSkylineList::preprocess(data, tmpl);
    const SkylineResult adaptive = list.adaptive_query(pref);
    const IpoTree tree = IpoTree::build(data, tmpl);
    const SkylineResult ipo = tree.query(pref);
    const IdSet disq = tree.query_disqualified(pref);
    const IdSet via_disq = set_minus(tree.root_skyline(), disq);

    if (full.members != oracle.members || adaptive.members != oracle.members ||
        ipo.members != oracle.members || via_disq != oracle.members)
      throw InternalError("algorithms disagree with the oracle on trial " + std::to_string(q));
    ++ran;
  }
  std::cout << "check OK: " << ran << " trials on " << data.size() << " points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skypref: in-memory skyline queries with per-user preferences on nominal attributes"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  GenConfig gen_cfg;
  std::string gen_kind = "independent";
  std::string gen_out = default_out_dir() + "/data.csv";
  std::string gen_schema_out;
  gen->add_option("--kind", gen_kind, "independent|correlated|anti-correlated");
  gen->add_option("--n", gen_cfg.n_tuples, "number of tuples");
  gen->add_option("--numeric", gen_cfg.n_numeric, "numeric dimensions");
  gen->add_option("--nominal", gen_cfg.n_nominal, "nominal dimensions");
  gen->add_option("--cardinality", gen_cfg.cardinality, "values per nominal dimension");
  gen->add_option("--theta", gen_cfg.zipf_theta, "Zipf exponent");
  gen->add_option("--jitter", gen_cfg.jitter, "numeric jitter width");
  gen->add_option("--seed", gen_cfg.seed, "generator seed");
  gen->add_option("--out", gen_out, "output CSV path");
  gen->add_option("--schema-out", gen_schema_out, "output schema path (default: <out>.schema)");

  // skyline
  auto* sky = app.add_subcommand("skyline", "run one skyline query and print ids progressively");
  DataArgs sky_data;
  sky_data.attach(sky);
  std::string sky_algo = "sfs-d";
  std::string sky_pref;
  std::string sky_tmpl;
  bool sky_stats = false;
  sky->add_option("--algo", sky_algo, "brute|sfs-d|sfs-a|ipo");
  sky->add_option("--pref", sky_pref, "query preference, e.g. \"attr: v1 < v2 < *\"");
  sky->add_option("--template", sky_tmpl, "template preference (@freq = most frequent value)");
  sky->add_flag("--stats", sky_stats, "print instrumentation counters to stderr");

  // preprocess
  auto* prep = app.add_subcommand("preprocess", "build and save the adaptive-SFS sorted list");
  DataArgs prep_data;
  prep_data.attach(prep);
  std::string prep_tmpl;
  std::string prep_out = default_out_dir() + "/list.snapshot";
  prep->add_option("--template", prep_tmpl, "template preference");
  prep->add_option("--out", prep_out, "snapshot path");

  // build-ipo
  auto* bipo = app.add_subcommand("build-ipo", "build and save an IPO-tree");
  DataArgs bipo_data;
  bipo_data.attach(bipo);
  std::string bipo_tmpl;
  std::size_t bipo_topk = 0;
  std::string bipo_out = default_out_dir() + "/tree.snapshot";
  bipo->add_option("--template", bipo_tmpl, "template preference");
  bipo->add_option("--topk", bipo_topk, "materialize only the k most frequent values (0 = all)");
  bipo->add_option("--out", bipo_out, "snapshot path");

  // query
  auto* qry = app.add_subcommand("query", "answer a preference query from saved snapshots");
  DataArgs qry_data;
  qry_data.attach(qry);
  std::string qry_tree, qry_list, qry_pref;
  qry->add_option("--tree", qry_tree, "IPO-tree snapshot");
  qry->add_option("--list", qry_list, "sorted-list snapshot (fallback when both given)");
  qry->add_option("--pref", qry_pref, "query preference");

  // bench
  auto* bench = app.add_subcommand("bench", "run the benchmark harness and emit metrics CSV");
  BenchArgs ba;
  ba.data.attach(bench, /*required=*/false);
  bench->add_option("--kind", ba.kind, "generator family when no --data given");
  bench->add_option("--n", ba.gen.n_tuples, "tuples to generate");
  bench->add_option("--numeric", ba.gen.n_numeric, "numeric dimensions");
  bench->add_option("--nominal", ba.gen.n_nominal, "nominal dimensions");
  bench->add_option("--cardinality", ba.gen.cardinality, "values per nominal dimension");
  bench->add_option("--theta", ba.gen.zipf_theta, "Zipf exponent");
  bench->add_option("--gen-seed", ba.gen.seed, "generator seed");
  bench->add_option("--template", ba.tmpl_text, "template (@freq = most frequent value)");
  bench->add_option("--algo", ba.algos, "algorithms: sfs-d sfs-a ipo-tree ipo-tree-k");
  bench->add_option("--order", ba.order, "order of generated query preferences");
  bench->add_option("--queries", ba.queries, "number of random queries");
  bench->add_option("--reps", ba.reps, "repetitions for preprocessing timing");
  bench->add_option("--topk", ba.topk, "restriction size for ipo-tree-k");
  bench->add_option("--seed", ba.seed, "query-workload seed");
  bench->add_option("--out", ba.out, "metrics CSV path (default $SKYPREF_OUT_DIR/metrics.csv)");
  bench->add_flag("--verify", ba.verify, "cross-check that all algorithms agree per query");

  // check
  auto* chk = app.add_subcommand("check", "oracle-equivalence suite on a dataset sample");
  DataArgs chk_data;
  chk_data.attach(chk, /*required=*/false);
  std::size_t chk_n = 200, chk_queries = 50, chk_sample = 500;
  std::uint32_t chk_card = 4;
  std::uint64_t chk_seed = 1;
  chk->add_option("--n", chk_n, "generated sample size when no --data given");
  chk->add_option("--cardinality", chk_card, "generated nominal cardinality");
  chk->add_option("--queries", chk_queries, "number of random trials");
  chk->add_option("--seed", chk_seed, "trial seed");
  chk->add_option("--sample", chk_sample, "maximum points sampled from --data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const std::string schema_out =
          gen_schema_out.empty() ? gen_out + ".schema" : gen_schema_out;
      return cmd_gen(gen_cfg, gen_kind, gen_out, schema_out);
    }
    if (sky->parsed()) return cmd_skyline(sky_data, sky_algo, sky_pref, sky_tmpl, sky_stats);
    if (prep->parsed()) return cmd_preprocess(prep_data, prep_tmpl, prep_out);
    if (bipo->parsed()) return cmd_build_ipo(bipo_data, bipo_tmpl, bipo_topk, bipo_out);
    if (qry->parsed()) return cmd_query(qry_data, qry_tree, qry_list, qry_pref);
    if (bench->parsed()) return cmd_bench(ba);
    if (chk->parsed()) return cmd_check(chk_data, chk_n, chk_card, chk_queries, chk_seed, chk_sample);
  } catch (const skypref::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
