/**
 * Acceptance suite: runs every fixture and property the engine must satisfy
 * and prints one pass/fail line per criterion. Exits non-zero on failure.
 */
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "skypref/adaptive_sfs.hpp"
#include "skypref/bench.hpp"
#include "skypref/core.hpp"
#include "skypref/datagen.hpp"
#include "skypref/io.hpp"
#include "skypref/ipo_tree.hpp"
#include "skypref/skyline.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace skypref;
using namespace skypref::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string set_to_string(const IdSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "}";
}

// ---- criterion 1: customer skylines, all four algorithms -------------------

Outcome criterion_table2() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset d = table1();
  const Schema& s = d.schema();
  const Template tmpl = Template::for_schema(s);
  const auto list = SortedSkylineList::preprocess(d, tmpl);
  const auto tree = IpoTree::build(d, tmpl);

  const struct {
    const char* who;
    const char* text;
    IdSet want;
  } cases[] = {
      {"Alice", "Hotel-group: T < M < *", {kA, kC}},
      {"Bob", "", {kA, kC, kE, kF}},
      {"Chris", "Hotel-group: H < M < *", {kA, kC, kE}},
      {"David", "Hotel-group: H < M < T < *", {kA, kC, kE}},
      {"Emily", "Hotel-group: H < T < *", {kA, kC}},
      {"Fred", "Hotel-group: M < *", {kA, kC, kE, kF}},
  };
  for (const auto& c : cases) {
    const auto p = pref(s, c.text);
    const IdSet brute = brute_force_skyline(d, expand(p, s)).members;
    const IdSet full = sfs_full(d, p).members;
    const IdSet adaptive = list.adaptive_query(p).members;
    const IdSet ipo = tree.query(p).members;
    if (brute != c.want) out.fail(std::string(c.who) + ": brute " + set_to_string(brute));
    if (full != c.want) out.fail(std::string(c.who) + ": sfs " + set_to_string(full));
    if (adaptive != c.want)
      out.fail(std::string(c.who) + ": adaptive " + set_to_string(adaptive));
    if (ipo != c.want) out.fail(std::string(c.who) + ": ipo " + set_to_string(ipo));
  }
  if (seconds_since(t0) >= 1.0) out.fail("fixture exceeded 1 s");
  return out;
}

// ---- criterion 2: the two-nominal worked example ---------------------------

Outcome criterion_worked_example() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset d = table3();
  const Schema& s = d.schema();
  const auto tree = IpoTree::build(d, Template::for_schema(s));

  if (tree.root_skyline() != IdSet{kA, kC, kD, kE, kF})
    out.fail("root skyline " + set_to_string(tree.root_skyline()));
  if (tree.disqualified_at({ValueId{0}, ValueId{0}}) != IdSet{kD, kE, kF})
    out.fail("node T/G disqualified " +
             set_to_string(tree.disqualified_at({ValueId{0}, ValueId{0}})));

  const struct {
    const char* name;
    const char* text;
    IdSet want;
  } queries[] = {
      {"Q_A", "Hotel-group: M < *", {kA, kC, kD, kE, kF}},
      {"Q_B", "Hotel-group: M < *; Airline: G < *", {kA, kC, kE, kF}},
      {"Q_C", "Hotel-group: M < H < *; Airline: G < *", {kA, kC, kE, kF}},
      {"Q_D", "Hotel-group: M < H < *; Airline: G < R < *", {kA, kC, kE, kF}},
  };
  for (const auto& q : queries) {
    const IdSet got = tree.query(pref(s, q.text)).members;
    if (got != q.want) out.fail(std::string(q.name) + " returned " + set_to_string(got));
  }
  if (seconds_since(t0) >= 1.0) out.fail("fixture exceeded 1 s");
  return out;
}

// ---- criterion 3: the merging-property fixture ------------------------------

Outcome criterion_merge_fixture() {
  Outcome out;
  const Dataset d = table1();
  const IdSet got = merge_pair({kA, kC, kE, kF}, {kA, kC, kE}, 0, {ValueId{2}}, d);
  if (got != IdSet{kA, kC, kE, kF}) out.fail("merge returned " + set_to_string(got));
  return out;
}

// ---- criteria 4, 7, 10: the randomized equivalence run ---------------------

struct EquivalenceRun {
  std::size_t trials = 0;
  std::size_t equivalence_failures = 0;
  std::size_t progressive_failures = 0;
  std::size_t workbound_failures = 0;
  double elapsed_s = 0;
  std::string first_failure;
};

EquivalenceRun run_equivalence_suite() {
  EquivalenceRun run;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(0xACCE97ULL);
  const std::size_t datasets = 125, per_dataset = 8;
  for (std::size_t i = 0; i < datasets; ++i) {
    const Schema s = random_schema(rng);
    const Dataset d = random_dataset(rng, s, 1 + rng.below(200));
    const Template tmpl = random_template(rng, s, 2);
    const auto list = SortedSkylineList::preprocess(d, tmpl);
    const auto tree = IpoTree::build(d, tmpl);
    for (std::size_t q = 0; q < per_dataset; ++q) {
      const auto query = random_refining_query(rng, s, tmpl);
      ++run.trials;
      const auto why = oracle_equivalence_trial(d, tmpl, query, list, tree);
      if (why) {
        if (why->rfind("progressive:", 0) == 0)
          ++run.progressive_failures;
        else if (why->rfind("workbound:", 0) == 0)
          ++run.workbound_failures;
        else
          ++run.equivalence_failures;
        if (run.first_failure.empty()) run.first_failure = *why;
      }
    }
  }
  run.elapsed_s = seconds_since(t0);
  return run;
}

// ---- criterion 5: monotonicity under refinement -----------------------------

Outcome criterion_monotonicity() {
  Outcome out;
  Rng rng(0x7E0);
  std::size_t trials = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const Schema s = random_schema(rng);
    const Dataset d = random_dataset(rng, s, 1 + rng.below(200));
    for (std::size_t q = 0; q < 10; ++q) {
      const ImplicitPreference base = random_template(rng, s, 3);
      const ImplicitPreference refined = random_refining_query(rng, s, base);
      const auto sky_base = brute_force_skyline(d, expand(base, s)).members;
      const auto sky_ref = brute_force_skyline(d, expand(refined, s)).members;
      ++trials;
      if (!is_subset(sky_ref, sky_base)) {
        out.fail("violation at trial " + std::to_string(trials));
        return out;
      }
    }
  }
  out.detail = std::to_string(trials) + " refinement pairs";
  return out;
}

// ---- criterion 6: the merging property at random -----------------------------

Outcome criterion_merging_random() {
  Outcome out;
  Rng rng(0x7E2);
  std::size_t trials = 0;
  for (std::size_t i = 0; i < 125; ++i) {
    const Schema s = random_schema(rng);
    const Dataset d = random_dataset(rng, s, 1 + rng.below(200));
    for (std::size_t q = 0; q < 8; ++q) {
      const std::size_t dim = rng.below(s.nominal_count());
      const std::uint32_t c = s.cardinality(dim);
      const std::size_t x = 1 + rng.below(c);
      const auto values = random_distinct_values(rng, c, x);

      ImplicitPreference shared = ImplicitPreference::for_schema(s);
      for (std::size_t dd = 0; dd < s.nominal_count(); ++dd) {
        if (dd == dim) continue;
        const std::size_t len = rng.below(std::min<std::uint32_t>(3, s.cardinality(dd)) + 1);
        shared.set_list(s, dd, random_distinct_values(rng, s.cardinality(dd), len));
      }
      ImplicitPreference first = shared, single = shared, combined = shared;
      const std::vector<ValueId> prefix(values.begin(), values.end() - 1);
      first.set_list(s, dim, prefix);
      single.set_list(s, dim, {values.back()});
      combined.set_list(s, dim, values);

      const auto sky1 = brute_force_skyline(d, expand(first, s)).members;
      const auto sky2 = brute_force_skyline(d, expand(single, s)).members;
      const auto want = brute_force_skyline(d, expand(combined, s)).members;
      ++trials;
      if (merge_pair(sky1, sky2, dim, prefix, d) != want) {
        out.fail("violation at trial " + std::to_string(trials));
        return out;
      }
    }
  }
  out.detail = std::to_string(trials) + " theorem instances";
  return out;
}

// ---- criterion 8: tree structure ---------------------------------------------

Outcome criterion_structure() {
  Outcome out;
  Rng rng(0x7E8);
  auto expected_nodes = [](const std::vector<std::uint32_t>& cards) {
    std::size_t total = 1, level = 1;
    for (std::uint32_t c : cards) {
      level *= c + 1;
      total += level;
    }
    return total;
  };

  for (std::size_t md = 1; md <= 3; ++md) {
    for (std::uint32_t c = 2; c <= 5; ++c) {
      std::vector<NominalAttr> noms;
      std::vector<std::uint32_t> cards;
      for (std::size_t dd = 0; dd < md; ++dd) {
        NominalAttr a{"d" + std::to_string(dd), {}};
        for (std::uint32_t v = 0; v < c; ++v) a.domain.push_back("v" + std::to_string(v));
        noms.push_back(std::move(a));
        cards.push_back(c);
      }
      const Schema s({{"x", Direction::kMin}}, noms);
      const Dataset d = random_dataset(rng, s, 25);
      const auto tree = IpoTree::build(d, Template::for_schema(s));
      if (tree.node_count() != expected_nodes(cards))
        out.fail("node count mismatch at m'=" + std::to_string(md) +
                 " c=" + std::to_string(c));
      if (tree.depth() != md + 1)
        out.fail("depth mismatch at m'=" + std::to_string(md));
    }
  }
  const auto tree3 = IpoTree::build(table3(), Template::for_schema(table3_schema()));
  if (tree3.node_count() != 21) out.fail("two-nominal fixture tree is not 21 nodes");
  return out;
}

// ---- criterion 9: performance trend -------------------------------------------

Outcome criterion_performance() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();

  GenConfig g;
  g.kind = DataKind::kAntiCorrelated;
  g.n_tuples = 100'000;
  g.n_numeric = 3;
  g.n_nominal = 2;
  g.cardinality = 10;
  g.zipf_theta = 1.0;
  g.seed = 9;
  const Dataset d = gen_synthetic(g);

  BenchConfig cfg;
  cfg.kind_label = "anti-correlated";
  cfg.zipf_theta = g.zipf_theta;
  cfg.tmpl = frequency_template(d);
  cfg.algos = {Algo::kSfsD, Algo::kSfsA, Algo::kIpoTree};
  cfg.order = 3;
  cfg.queries = 100;
  cfg.reps = 1;
  cfg.seed = 99;
  cfg.verify = true;

  const auto rows = run_bench(cfg, d);
  double sfsd = 0, sfsa = 0, ipo = 0;
  for (const auto& r : rows) {
    if (r.algorithm == "sfs-d") sfsd = r.metrics.query_ms_mean;
    if (r.algorithm == "sfs-a") sfsa = r.metrics.query_ms_mean;
    if (r.algorithm == "ipo-tree") ipo = r.metrics.query_ms_mean;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean query ms: ipo=%.3f sfs-a=%.3f sfs-d=%.3f", ipo, sfsa,
                sfsd);
  out.detail = buf;
  if (!(ipo <= sfsa)) out.fail("ipo-tree is not <= sfs-a");
  if (!(sfsa <= sfsd)) out.fail("sfs-a is not <= sfs-d");
  if (!(sfsd >= 10.0 * sfsa)) out.fail("sfs-a is not 10x faster than sfs-d");
  const double elapsed = seconds_since(t0);
  if (elapsed >= 600.0) out.fail("suite exceeded 10 minutes");
  out.detail += " (" + std::to_string(elapsed).substr(0, 5) + " s)";
  return out;
}

// ---- criterion 11: incremental maintenance --------------------------------------

Outcome criterion_maintenance() {
  Outcome out;
  GenConfig g;
  g.kind = DataKind::kIndependent;
  g.n_tuples = 1000;
  g.n_numeric = 2;
  g.n_nominal = 2;
  g.cardinality = 6;
  g.seed = 11;
  Dataset d = gen_synthetic(g);
  const Template tmpl = frequency_template(d);
  const auto orders = expand(tmpl, d.schema());
  auto list = SortedSkylineList::preprocess(d, tmpl);

  Rng rng(0xB0B);
  PointId next_id = 1'000'000;
  for (int op = 0; op < 1000; ++op) {
    if (d.size() == 0 || rng.below(2) == 0) {
      Point p;
      p.id = next_id++;
      for (std::size_t k = 0; k < d.schema().numeric_count(); ++k)
        p.numeric.push_back(rng.uniform01());
      for (std::size_t dd = 0; dd < d.schema().nominal_count(); ++dd)
        p.nominal.push_back(static_cast<ValueId>(rng.below(d.schema().cardinality(dd))));
      list.insert_point(d, p);
    } else {
      list.delete_point(d, d.id(rng.below(d.size())));
    }
    if (list.members() != brute_force_skyline(d, orders).members) {
      out.fail("list diverged from the oracle after op " + std::to_string(op));
      return out;
    }
  }
  out.detail = "1000 interleaved updates";
  return out;
}

// ---- criterion 12: generator distributions ----------------------------------------

Outcome criterion_datagen() {
  Outcome out;

  GenConfig g;
  g.n_tuples = 100'000;
  g.cardinality = 20;
  g.zipf_theta = 1.0;
  g.seed = 12;
  const Dataset zipf = gen_synthetic(g);
  for (std::size_t dim = 0; dim < 2; ++dim) {
    std::vector<std::size_t> counts(20, 0);
    for (std::size_t i = 0; i < zipf.size(); ++i) ++counts[zipf.nominal(i, dim)];
    const double ratio = static_cast<double>(counts[0]) / static_cast<double>(counts[1]);
    if (std::abs(ratio - 2.0) > 0.1)
      out.fail("rank-1/rank-2 ratio " + std::to_string(ratio) + " outside 2 +/- 5%");
  }

  GenConfig a;
  a.kind = DataKind::kAntiCorrelated;
  a.n_tuples = 10'000;
  a.seed = 13;
  const Dataset anti = gen_synthetic(a);
  double corr_sum = 0;
  int pairs = 0;
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t y = x + 1; y < 3; ++y) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < anti.size(); ++i) {
        mx += anti.numeric(i, x);
        my += anti.numeric(i, y);
      }
      mx /= anti.size();
      my /= anti.size();
      double cov = 0, vx = 0, vy = 0;
      for (std::size_t i = 0; i < anti.size(); ++i) {
        const double dx = anti.numeric(i, x) - mx;
        const double dy = anti.numeric(i, y) - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
      }
      corr_sum += cov / std::sqrt(vx * vy);
      ++pairs;
    }
  if (!(corr_sum / pairs < 0.0)) out.fail("anti-correlated family has non-negative correlation");

  GenConfig s;
  s.n_tuples = 5000;
  s.seed = 14;
  std::stringstream once, twice;
  save_dataset_csv(gen_synthetic(s), once);
  save_dataset_csv(gen_synthetic(s), twice);
  if (once.str() != twice.str()) out.fail("same-seed generation is not byte-identical");
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  const auto report = [&](int num, const char* name, const Outcome& o) {
    std::printf("[%s] %2d. %s%s%s\n", o.pass ? "PASS" : "FAIL", num, name,
                o.detail.empty() ? "" : " - ", o.detail.c_str());
    if (!o.pass) ++failed;
    std::fflush(stdout);
  };

  report(1, "customer skylines, one nominal attribute (all four algorithms)",
         criterion_table2());
  report(2, "two-nominal worked example (IPO-tree)", criterion_worked_example());
  report(3, "pairwise merge fixture", criterion_merge_fixture());

  const EquivalenceRun run = run_equivalence_suite();
  {
    Outcome o;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu trials in %.1f s", run.trials, run.elapsed_s);
    o.detail = buf;
    if (run.equivalence_failures) o.fail("mismatches: " + run.first_failure);
    if (run.elapsed_s >= 60.0) o.fail("suite exceeded 60 s");
    report(4, "oracle equivalence across all algorithms", o);
  }

  report(5, "monotonicity under refinement", criterion_monotonicity());
  report(6, "pairwise merge equals the oracle on random instances",
         criterion_merging_random());

  {
    Outcome o;
    if (run.progressive_failures)
      o.fail(std::to_string(run.progressive_failures) + " retraction failures");
    else
      o.detail = "no emission retracted across the equivalence run";
    report(7, "progressive emission is prefix-stable", o);
  }

  report(8, "tree node count and depth match the closed form", criterion_structure());
  report(9, "query-time ordering: ipo-tree <= sfs-a <= sfs-d, sfs-a 10x under sfs-d",
         criterion_performance());

  {
    Outcome o;
    if (run.workbound_failures)
      o.fail(std::to_string(run.workbound_failures) + " instrumentation violations");
    else
      o.detail = "re-scored = |AFFECT| and folds within bound on every trial";
    report(10, "instrumented work bounds", o);
  }

  report(11, "incremental maintenance tracks the oracle", criterion_maintenance());
  report(12, "generator distributions", criterion_datagen());

  std::printf("RESULT: %d/12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}
