// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run via `ctest --test-dir build -R acceptance` or directly.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <unistd.h>
#include <iostream>
#include <sstream>
#include <vector>

#include "docamr/builder.hpp"
#include "docamr/document.hpp"
#include "docamr/errors.hpp"
#include "docamr/injector.hpp"
#include "docamr/penman.hpp"
#include "docamr/smatch.hpp"
#include "docamr/synthetic.hpp"
#include "lossless_check.hpp"
#include "test_util.hpp"

using namespace docamr;
using namespace docamr::testutil;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  std::string name;
  std::function<void()> run;
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

Document fixture_doc(const std::string& stem) {
  return load_document(fixture(stem + ".amr"),
                       fixture(stem + ".coref.json"));
}

// ---------------------------------------------------------------------
// 1. golden scenario fixtures

void criterion_goldens() {
  auto t0 = std::chrono::steady_clock::now();

  fs::path dir = fs::temp_directory_path() /
                 ("docamr_goldens_" + std::to_string(getpid()));
  fs::create_directories(dir);

  struct Case {
    const char* stem;
    BuildMode mode;
    const char* golden;
  };
  const Case cases[] = {
      {"travel", BuildMode::kDocamr, "travel.gold-docamr.damr"},
      {"travel", BuildMode::kMergeAll, "travel.gold-merge-all.damr"},
      {"cats", BuildMode::kDocamr, "cats.gold-docamr.damr"},
      {"cats", BuildMode::kMergeAll, "cats.gold-merge-all.damr"},
      {"favor", BuildMode::kDocamr, "favor.gold-docamr.damr"},
      {"favor", BuildMode::kMergeAll, "favor.gold-merge-all.damr"},
      {"dialogue", BuildMode::kDocamr, "dialogue.gold-docamr.damr"},
      {"namesake", BuildMode::kDocamr, "namesake.gold-docamr.damr"},
      {"cola", BuildMode::kDocamr, "cola.gold-docamr.damr"},
  };
  for (const Case& c : cases) {
    // through the real CLI surface, file in and file out
    std::string out_path =
        (dir / (std::string(c.stem) + "." + build_mode_name(c.mode)))
            .string();
    std::string cmd = std::string(DOCAMR_CLI_PATH) + " build --amr " +
                      fixture(std::string(c.stem) + ".amr") + " --coref " +
                      fixture(std::string(c.stem) + ".coref.json") +
                      " --mode " + build_mode_name(c.mode) + " --out " +
                      out_path + " 2>/dev/null";
    if (std::system(cmd.c_str()) != 0)
      throw Failure(std::string("build command failed for ") + c.stem);
    AmrGraph built_graph = parse_penman_one(slurp(out_path));
    AmrGraph golden = parse_penman_one(slurp(fixture(c.golden)));
    Triples built = triples_of(built_graph);
    Triples want = triples_of(golden);
    if (!(built == want))
      throw Failure(std::string(c.stem) + " (" + build_mode_name(c.mode) +
                    ") diverges from golden:\n" + diff_triples(built, want));
  }

  // Structural spot checks named by the criterion.
  {
    DocGraph dg = build(fixture_doc("favor"), BuildMode::kDocamr);
    int coref = 0;
    for (const Relation& r : dg.graph.relations)
      if (r.role == ":coref" && r.target == "ce0") ++coref;
    require(coref == 3, "favor coref-entity lacks three :coref in-edges");
    require(!dg.graph.instances.count("s2.h"), "favor pronoun not dropped");
    bool retarget = false;
    for (const Relation& r : dg.graph.relations)
      if (r.source == "s2.g" && r.role == ":ARG2" && r.target == "s3.f2")
        retarget = true;
    require(retarget, "favor :ARG2 not re-targeted to fellow");
  }
  {
    DocGraph dg = build(fixture_doc("namesake"), BuildMode::kDocamr);
    int names = 0;
    for (const Relation& r : dg.graph.relations)
      if (r.source == "s1.p" && r.role == ":name") ++names;
    require(names == 2, "namesake merged NE lacks two :name subgraphs");
  }
  {
    DocGraph dg = build(fixture_doc("cola"), BuildMode::kDocamr);
    require(!dg.graph.instances.count("s1.i") &&
                !dg.graph.instances.count("s2.y"),
            "cola pronouns not dropped");
    bool retarget = false;
    for (const Relation& r : dg.graph.relations)
      if (r.source == "s2.cr" && r.role == ":ARG0" && r.target == "s3.p")
        retarget = true;
    require(retarget, "cola crack-up-03 edge not re-targeted");
  }
  {
    DocGraph dg = build(fixture_doc("dialogue"), BuildMode::kDocamr);
    require(dg.graph.instances.count("ie0") &&
                dg.graph.instances.at("ie0") == "interlocutor-entity",
            "dialogue interlocutor-entity missing");
  }

  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  require(secs < 1.0, "golden fixture suite took " + std::to_string(secs) +
                          "s (budget 1s)");
}

// ---------------------------------------------------------------------
// 2. losslessness over random documents

void criterion_losslessness() {
  Rng rng{20240601};
  GenOptions opts;  // 2..8 sentences, chains, NEs, pronouns, bridging
  const int kDocs = 1000;
  for (int i = 0; i < kDocs; ++i) {
    Document doc = random_document(rng, opts, "loss" + std::to_string(i));
    DocGraph dg = build(doc, BuildMode::kDocamr);
    dg.validate();
    auto violations = check_losslessness(doc, dg);
    if (!violations.empty())
      throw Failure("document " + std::to_string(i) + ": " + violations[0] +
                    " (and " + std::to_string(violations.size() - 1) +
                    " more)");
  }
}

// ---------------------------------------------------------------------
// 3 + 4. constraint soundness and hill-climb optimality on small pairs

struct SmallPair {
  TripleSet gold;
  TripleSet pred;
};

std::vector<SmallPair> small_pairs(int want) {
  Rng rng{424242};
  GenOptions opts;
  opts.min_sentences = 2;
  opts.max_sentences = 3;
  opts.min_nodes = 1;
  opts.max_nodes = 3;
  opts.max_chains = 1;
  opts.chain_max_members = 2;
  opts.p_named_entity = 0.0;   // name nodes would push past 10 variables
  opts.max_implicit_roles = 1;
  opts.max_bridging = 1;
  PerturbOptions popts;
  popts.p_delete_relation = 0.12;
  popts.p_relabel_relation = 0.08;
  popts.p_corrupt_concept = 0.08;
  popts.p_delete_attribute = 0.12;

  std::vector<SmallPair> pairs;
  int idx = 0;
  while (static_cast<int>(pairs.size()) < want) {
    Document doc = random_document(rng, opts, "sp" + std::to_string(idx++));
    DocGraph gold = build(doc, BuildMode::kDocamr);
    if (gold.graph.instances.size() > 10) continue;
    DocGraph pred = perturb_doc_graph(gold, rng, popts);
    pairs.push_back({extract_triples(gold), extract_triples(pred)});
  }
  return pairs;
}

void criterion_constraint_soundness() {
  std::vector<SmallPair> pairs = small_pairs(500);
  for (size_t i = 0; i < pairs.size(); ++i) {
    SearchConfig uncons;
    SearchConfig cons;
    cons.constrained = true;
    auto [mu, free_res] = exact_match(pairs[i].pred, pairs[i].gold, uncons);
    auto [mc, cons_res] = exact_match(pairs[i].pred, pairs[i].gold, cons);
    if (free_res.matched != cons_res.matched)
      throw Failure("pair " + std::to_string(i) + ": unconstrained " +
                    std::to_string(free_res.matched) + " vs constrained " +
                    std::to_string(cons_res.matched));
  }
}

void criterion_hill_climb_optimality() {
  std::vector<SmallPair> pairs = small_pairs(500);
  int attained = 0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    SearchConfig cfg;
    cfg.seed = 42;
    cfg.restarts = 4;
    auto [me, exact] = exact_match(pairs[i].pred, pairs[i].gold, cfg);
    auto [mh, hill] = hill_climb(pairs[i].pred, pairs[i].gold, cfg);
    if (hill.matched > exact.matched)
      throw Failure("pair " + std::to_string(i) +
                    ": hill climb exceeded the exact optimum");
    if (hill.matched == exact.matched) ++attained;
  }
  double rate = static_cast<double>(attained) / pairs.size();
  require(rate >= 0.95, "hill climb attained the optimum on " +
                            std::to_string(100.0 * rate) + "% (need 95%)");
  std::printf("    hill climb optimal on %d/%zu pairs\n", attained,
              pairs.size());
}

// ---------------------------------------------------------------------
// 5. subscore sanity on the scenario fixtures

void criterion_subscore_sanity() {
  for (const char* stem : {"travel", "cats", "favor", "dialogue", "namesake",
                           "cola"}) {
    Document doc = fixture_doc(stem);
    TripleSet gold = extract_triples(build(doc, BuildMode::kDocamr));
    TripleSet bare = extract_triples(build(doc, BuildMode::kNoCoref));
    SearchConfig cfg;
    cfg.seed = 42;

    auto [m1, self_res] = hill_climb(gold, gold, cfg);
    require(self_res.f1() == 1.0,
            std::string(stem) + ": gold vs gold f1 != 1.0");
    require(self_res.coref_f1() == 1.0,
            std::string(stem) + ": gold vs gold coref f1 != 1.0");

    auto [m2, none_res] = hill_climb(bare, gold, cfg);
    require(none_res.coref_f1() == 0.0,
            std::string(stem) + ": no-coref coref f1 != 0");
    require(none_res.f1() > 0.0 && none_res.f1() < 1.0,
            std::string(stem) + ": no-coref smatch not strictly in (0,1)");
  }
}

// ---------------------------------------------------------------------
// 6. speedup of the constrained candidate pool

void criterion_speedup() {
  auto wall0 = std::chrono::steady_clock::now();
  Rng rng{31};
  GenOptions opts;
  opts.min_sentences = 30;
  opts.max_sentences = 30;
  opts.min_nodes = 4;
  opts.max_nodes = 7;
  opts.max_chains = 10;
  PerturbOptions popts;

  double total_cons = 0.0, total_uncons = 0.0;
  const int kDocs = 3;
  for (int d = 0; d < kDocs; ++d) {
    Document doc = random_document(rng, opts, "speed" + std::to_string(d));
    DocGraph gold = build(doc, BuildMode::kDocamr);
    DocGraph pred = perturb_doc_graph(gold, rng, popts);
    TripleSet gold_ts = extract_triples(gold);
    TripleSet pred_ts = extract_triples(pred);

    SearchConfig cfg;
    cfg.seed = 42;
    cfg.constrained = false;
    auto [mu, uncons] = hill_climb(pred_ts, gold_ts, cfg);
    cfg.constrained = true;
    auto [mc, cons] = hill_climb(pred_ts, gold_ts, cfg);

    total_uncons += uncons.elapsed_ms;
    total_cons += cons.elapsed_ms;
    if (cons.f1() < uncons.f1() - 1e-9)
      throw Failure("doc " + std::to_string(d) + ": constrained f1 " +
                    std::to_string(cons.f1()) + " below unconstrained " +
                    std::to_string(uncons.f1()));

    // pool property: single-sentence nodes only see targets that include
    // their sentence
    auto pool = candidate_pool(pred_ts, gold_ts, true);
    std::map<int, int> targets_touching;  // sentence -> target var count
    for (const auto& p : gold_ts.provenance)
      for (int sent : p) targets_touching[sent]++;
    for (size_t v = 0; v < pred_ts.vars.size(); ++v) {
      if (pred_ts.provenance[v].size() != 1) continue;
      int sent = pred_ts.provenance[v][0];
      require(static_cast<int>(pool[v].size()) <= targets_touching[sent],
              "constrained pool exceeds the sentence's node count");
      for (int u : pool[v]) {
        const auto& p = gold_ts.provenance[u];
        require(std::find(p.begin(), p.end(), sent) != p.end(),
                "constrained pool leaked outside the sentence");
      }
    }
  }

  double speedup = total_cons > 0 ? total_uncons / total_cons : 0.0;
  std::printf("    constrained %.1fms vs unconstrained %.1fms -> %.1fx\n",
              total_cons, total_uncons, speedup);
  require(speedup >= 5.0, "speedup " + std::to_string(speedup) +
                              "x below the 5x threshold");
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - wall0)
                    .count();
  require(secs < 300.0, "benchmark exceeded the five-minute budget");
}

// ---------------------------------------------------------------------
// 7. merge-mode contrast

void criterion_merge_contrast() {
  Document doc = fixture_doc("favor");
  DocGraph merged = build(doc, BuildMode::kMergeAll);
  int favor_args = 0;
  for (const Relation& r : merged.graph.relations)
    if (r.source == "s1.f" && r.role.rfind(":ARG", 0) == 0) ++favor_args;
  require(favor_args >= 3,
          "merge-all: favor did not inherit the :ARG edges");

  DocGraph plain = build(doc, BuildMode::kDocamr);
  for (const Relation& r : plain.graph.relations)
    require(!(r.source == "s1.f" && r.role.rfind(":ARG", 0) == 0),
            "docamr: favor must not carry :ARG edges");

  Document top = fixture_doc("cats");
  DocGraph top_merged = build(top, BuildMode::kMergeAll);
  bool polarity_migrated = false;
  for (const Attribute& a : top_merged.graph.attributes)
    if (a.source == "s1.h" && a.role == ":polarity") polarity_migrated = true;
  require(polarity_migrated,
          "merge-all: :polarity did not migrate onto the merged event");
  DocGraph top_plain = build(top, BuildMode::kDocamr);
  for (const Attribute& a : top_plain.graph.attributes)
    require(!(a.source == "s1.h" && a.role == ":polarity"),
            "docamr: :polarity must stay on like-01");
}

// ---------------------------------------------------------------------
// 8. injector fixtures

void criterion_injector() {
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok could you give him a lift today\n"
      "(g / give-01~2 :ARG0 (y / you~1) :ARG2 (h / he~3) "
      ":ARG1 (l / lift~5) :time (t / today~6))\n"
      "\n"
      "# ::id s2\n# ::tok the fellow waited\n"
      "(w / wait-01~2 :ARG1 (f / fellow~1))\n");

  // node spans
  std::map<Var, NodeSpan> spans;
  for (const NodeSpan& s : node_spans(sents[0])) spans[s.variable] = s;
  require(spans.at("g").start == 1 && spans.at("g").end == 6,
          "give-01 span is not the hull of its descendants");
  require(spans.at("h").start == 3 && spans.at("h").end == 3,
          "pronoun span wrong");

  // shortest containing span
  std::vector<MentionCluster> clusters = {
      {"c0", {{"s1", 3, 3}, {"s2", 1, 1}}}};
  InjectResult res = assign_mentions(sents, clusters, "doc");
  require(res.annotation.chains.size() == 1, "expected one chain");
  require(res.annotation.chains[0].members[0] == NodeRef{"s1", "h"},
          "mention did not land on the shortest containing span");

  // greatest-height tie break
  std::vector<AmrGraph> tie = parse_penman(
      "# ::id s1\n# ::tok w a b\n"
      "(r / root~0 :ARG0 (x / tall :mod (y / wide~1,2)))\n"
      "\n"
      "# ::id s2\n# ::tok other thing\n"
      "(o / other~0 :mod (p / partner~1))\n");
  InjectResult tied = assign_mentions(
      tie, {{"c0", {{"s1", 1, 2}, {"s2", 1, 1}}}}, "doc");
  require(tied.annotation.chains.size() == 1 &&
              tied.annotation.chains[0].members[0] == NodeRef{"s1", "x"},
          "greatest-height tie break failed");

  // within-sentence clusters are discarded
  InjectResult within = assign_mentions(
      sents, {{"c0", {{"s1", 1, 1}, {"s1", 3, 3}}}}, "doc");
  require(within.annotation.chains.empty(),
          "within-sentence cluster was not discarded");

  // determinism across ten runs
  std::string first =
      serialize_annotation_json(assign_mentions(sents, clusters, "doc")
                                    .annotation);
  for (int i = 0; i < 10; ++i) {
    std::string again = serialize_annotation_json(
        assign_mentions(sents, clusters, "doc").annotation);
    require(again == first, "injector output varies across runs");
  }
}

// ---------------------------------------------------------------------
// 9. CLI determinism

std::string run_capture(const std::string& cmd) {
  std::string full = cmd + " 2>/dev/null";
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) throw Failure("cannot launch: " + cmd);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  if (WEXITSTATUS(status) != 0)
    throw Failure("command failed (" + std::to_string(WEXITSTATUS(status)) +
                  "): " + cmd);
  return out;
}

void criterion_cli_determinism() {
  const std::string cli = DOCAMR_CLI_PATH;
  fs::path dir = fs::temp_directory_path() /
                 ("docamr_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  std::string gold = (dir / "gold.damr").string();
  std::string pred = (dir / "pred.damr").string();

  run_capture(cli + " build --amr " + fixture("favor.amr") + " --coref " +
              fixture("favor.coref.json") + " --mode docamr --out " + gold);
  run_capture(cli + " build --amr " + fixture("favor.amr") + " --coref " +
              fixture("favor.coref.json") + " --mode no-merge --out " + pred);

  std::string a = run_capture(cli + " --json evaluate --gold " + gold +
                              " --pred " + pred + " --seed 42");
  std::string b = run_capture(cli + " --json evaluate --gold " + gold +
                              " --pred " + pred + " --seed 42");
  require(!a.empty() && a == b,
          "evaluate --seed 42 is not byte-identical across runs");

  std::string t1 = run_capture(cli + " --json --threads 1 evaluate --gold " +
                               gold + " --pred " + pred + " --seed 42");
  std::string t4 = run_capture(cli + " --json --threads 4 evaluate --gold " +
                               gold + " --pred " + pred + " --seed 42");
  require(t1 == t4, "thread count changed the report");
  require(t1 == a, "threaded report differs from the default run");
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"golden fixture suite (docamr builds, <1s)", criterion_goldens},
      {"losslessness over 1000 random documents", criterion_losslessness},
      {"constraint soundness on 500 exact pairs", criterion_constraint_soundness},
      {"hill-climb optimality >=95% on small pairs",
       criterion_hill_climb_optimality},
      {"coreference subscore sanity (gold/none, gold/gold)",
       criterion_subscore_sanity},
      {"constrained scoring >=5x speedup at 30 sentences", criterion_speedup},
      {"merge-mode contrast (merge-all distortions)", criterion_merge_contrast},
      {"injector span assignment fixtures", criterion_injector},
      {"CLI determinism (--seed 42, --threads)", criterion_cli_determinism},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      criteria[i].run();
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = e.what();
      ++failures;
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    std::printf("[%zu] %-55s %s (%.2fs)\n", i + 1, criteria[i].name.c_str(),
                verdict.c_str(), secs);
    if (!detail.empty()) std::printf("    %s\n", detail.c_str());
  }
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu acceptance criteria passed\n", criteria.size());
  return 0;
}
