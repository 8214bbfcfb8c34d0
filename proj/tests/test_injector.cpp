#include "docamr/injector.hpp"

#include <map>

#include "doctest.h"

#include "docamr/builder.hpp"
#include "docamr/errors.hpp"
#include "docamr/penman.hpp"
#include "test_util.hpp"

using namespace docamr;
using namespace docamr::testutil;

namespace {

std::map<Var, NodeSpan> span_map(const AmrGraph& g) {
  std::map<Var, NodeSpan> out;
  for (const NodeSpan& s : node_spans(g)) out[s.variable] = s;
  return out;
}

}  // namespace

TEST_CASE("single-token subtree span") {
  AmrGraph g = parse_penman_one(
      "# ::id t.1\n# ::tok Bill runs\n"
      "(p / person~0 :name (n / name :op1 \"Bill\"~0))");
  auto spans = span_map(g);
  REQUIRE(spans.count("p"));
  CHECK(spans["p"].start == 0);
  CHECK(spans["p"].end == 0);
  CHECK(spans["p"].height == 2);  // name child, then its op leaf
  REQUIRE(spans.count("n"));
  CHECK(spans["n"].height == 1);
}

TEST_CASE("re-entrancy removal keeps the first edge in traversal order") {
  // go-02 reaches b only through the removed second-parent edge, so its
  // span excludes boy's token.
  AmrGraph g = parse_penman_one(
      "# ::id t.1\n# ::tok the boy wants to go\n"
      "(w / want-01~2 :ARG0 (b / boy~1) :ARG1 (g / go-02~4 :ARG0 b))");
  auto spans = span_map(g);
  REQUIRE(spans.count("g"));
  CHECK(spans["g"].start == 4);
  CHECK(spans["g"].end == 4);
  REQUIRE(spans.count("w"));
  CHECK(spans["w"].start == 1);
  CHECK(spans["w"].end == 4);
}

TEST_CASE("span is the min-max hull over descendants") {
  AmrGraph g = parse_penman_one(
      "# ::id t.1\n# ::tok a b c d e f\n"
      "(x / alpha~2,5 :mod (y / beta~3))");
  auto spans = span_map(g);
  CHECK(spans["x"].start == 2);
  CHECK(spans["x"].end == 5);
  CHECK(spans["y"].start == 3);
  CHECK(spans["y"].end == 3);
}

TEST_CASE("unaligned subtrees yield no NodeSpan") {
  AmrGraph g = parse_penman_one(
      "# ::id t.1\n# ::tok run fast\n"
      "(r / run-02~0 :manner (f / fast))");
  auto spans = span_map(g);
  CHECK(spans.count("r"));
  CHECK(!spans.count("f"));
}

TEST_CASE("node_spans requires tokens") {
  AmrGraph g = parse_penman_one("(a / and)");
  CHECK_THROWS_AS(node_spans(g), UsageError);
}

TEST_CASE("mention assignment picks the shortest containing span") {
  // give-01 spans [0,6]; he spans [3,3]; a mention of "him" at 3 must land
  // on the pronoun node, not the verb.
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok could you give him a lift today\n"
      "(g / give-01~2 :ARG0 (y / you~1) :ARG2 (h / he~3) "
      ":ARG1 (l / lift~5) :time (t / today~6))\n"
      "\n"
      "# ::id s2\n# ::tok the fellow waited\n"
      "(w / wait-01~2 :ARG1 (f / fellow~1))\n");
  std::vector<MentionCluster> clusters = {
      {"c0", {{"s1", 3, 3}, {"s2", 1, 1}}}};
  InjectResult result = assign_mentions(sents, clusters, "doc");
  REQUIRE(result.annotation.chains.size() == 1);
  const IdentityChain& chain = result.annotation.chains[0];
  REQUIRE(chain.members.size() == 2);
  CHECK(chain.members[0] == NodeRef{"s1", "h"});
  CHECK(chain.members[1] == NodeRef{"s2", "f"});
  CHECK(result.assigned_mentions == 2);
  CHECK(result.dropped_mentions == 0);
}

TEST_CASE("length ties break by the greatest height") {
  // x and its child y cover the same [1,2] span; the taller node wins.
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok w a b\n"
      "(r / root~0 :ARG0 (x / tall :mod (y / wide~1,2)))\n"
      "\n"
      "# ::id s2\n# ::tok other thing\n"
      "(o / other~0 :mod (p / partner~1))\n");
  auto spans = span_map(sents[0]);
  CHECK(spans["x"].start == 1);
  CHECK(spans["x"].end == 2);
  CHECK(spans["y"].start == 1);
  CHECK(spans["y"].end == 2);
  CHECK(spans["x"].height > spans["y"].height);

  std::vector<MentionCluster> clusters = {
      {"c0", {{"s1", 1, 2}, {"s2", 1, 1}}}};
  InjectResult result = assign_mentions(sents, clusters, "doc");
  REQUIRE(result.annotation.chains.size() == 1);
  CHECK(result.annotation.chains[0].members[0] == NodeRef{"s1", "x"});
}

TEST_CASE("clusters inside a single sentence are discarded") {
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok john saw john\n"
      "(s / see-01~1 :ARG0 (p / person~0) :ARG1 (q / person~2))\n"
      "\n"
      "# ::id s2\n# ::tok nothing here\n"
      "(n / nothing~0)\n");
  std::vector<MentionCluster> clusters = {
      {"c0", {{"s1", 0, 0}, {"s1", 2, 2}}}};
  InjectResult result = assign_mentions(sents, clusters, "doc");
  CHECK(result.annotation.chains.empty());
  CHECK(result.assigned_mentions == 2);
}

TEST_CASE("unanchored mentions are dropped with a warning, counts reconcile") {
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok a b c\n(x / alpha~0)\n"
      "\n"
      "# ::id s2\n# ::tok d e\n(y / beta~0)\n");
  std::vector<MentionCluster> clusters = {
      {"c0", {{"s1", 0, 0}, {"s1", 2, 2}, {"s2", 0, 0}}}};
  InjectResult result = assign_mentions(sents, clusters, "doc");
  CHECK(result.total_mentions == 3);
  CHECK(result.assigned_mentions == 2);
  CHECK(result.dropped_mentions == 1);
  CHECK(result.assigned_mentions + result.dropped_mentions ==
        result.total_mentions);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("s1[2:2]") != std::string::npos);
  REQUIRE(result.annotation.chains.size() == 1);
}

TEST_CASE("out-of-range mentions are ingestion errors") {
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok a b\n(x / alpha~0)\n");
  CHECK_THROWS_AS(
      assign_mentions(sents, {{"c0", {{"s1", 0, 5}}}}, "doc"), IngestError);
  CHECK_THROWS_AS(
      assign_mentions(sents, {{"c0", {{"zz", 0, 0}}}}, "doc"), IngestError);
}

TEST_CASE("re-entrancy removal leaves every non-root with one parent") {
  AmrGraph g = parse_penman_one(
      "# ::id t\n# ::tok a b c d\n"
      "(a / alpha~0 :ARG0 (b / beta~1 :ARG1 (c / gamma~2)) :ARG2 (d / "
      "delta~3 :ARG0 c :ARG1 b))");
  SpanningTree tree = print_spanning_tree(g);
  std::map<Var, int> parents;
  for (const auto& [v, children] : tree.tree_children)
    for (int i : children) {
      const Relation& r = g.relations[i];
      parents[r.source == v ? r.target : r.source]++;
    }
  for (const auto& [v, count] : parents) CHECK(count == 1);
  int tree_edges = 0;
  for (char f : tree.is_tree_edge) tree_edges += f ? 1 : 0;
  CHECK(tree_edges == static_cast<int>(g.instances.size()) - 1);
}

TEST_CASE("injector output round-trips through ingestion") {
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok give him a lift\n"
      "(g / give-01~0 :ARG2 (h / he~1) :ARG1 (l / lift~3))\n"
      "\n"
      "# ::id s2\n# ::tok help the fellow\n"
      "(p / help-01~0 :ARG2 (f / fellow~2))\n");
  std::vector<MentionCluster> clusters = {
      {"pred0", {{"s1", 1, 1}, {"s2", 2, 2}}}};
  InjectResult result = assign_mentions(sents, clusters, "roundtrip");
  std::string json = serialize_annotation_json(result.annotation);
  DocumentAnnotation back = parse_annotation_json(json);
  Document doc = make_document(sents, back);  // validates references
  CHECK(doc.annotation.chains.size() == 1);
  CHECK(doc.annotation.chains[0].id == "c0");  // renumbered by first mention
  DocGraph dg = build(doc, BuildMode::kDocamr);
  dg.validate();
  // he dropped onto fellow
  CHECK(dg.merge_map.at({"s1", "h"}) == dg.merge_map.at({"s2", "f"}));
}

TEST_CASE("mentions JSON parses and serializes") {
  MentionFile file = parse_mentions_json(R"({
    "doc_id": "d0",
    "clusters": [{"id": "c0",
                  "mentions": [{"sent": "s1", "start": 3, "end": 4}]}]})");
  CHECK(file.doc_id == "d0");
  REQUIRE(file.clusters.size() == 1);
  CHECK(file.clusters[0].mentions[0].start == 3);
  MentionFile back = parse_mentions_json(serialize_mentions_json(file));
  CHECK(back.doc_id == file.doc_id);
  CHECK(back.clusters.size() == file.clusters.size());
}

TEST_CASE("assignment is stable across repeated runs") {
  std::vector<AmrGraph> sents = parse_penman(
      "# ::id s1\n# ::tok could you give him a lift today\n"
      "(g / give-01~2 :ARG0 (y / you~1) :ARG2 (h / he~3) "
      ":ARG1 (l / lift~5) :time (t / today~6))\n"
      "\n"
      "# ::id s2\n# ::tok the fellow waited\n"
      "(w / wait-01~2 :ARG1 (f / fellow~1))\n");
  std::vector<MentionCluster> clusters = {
      {"c0", {{"s1", 3, 3}, {"s2", 1, 1}}},
      {"c1", {{"s1", 1, 1}, {"s2", 1, 2}}}};
  std::string first =
      serialize_annotation_json(assign_mentions(sents, clusters, "d").annotation);
  for (int i = 0; i < 10; ++i) {
    std::string again = serialize_annotation_json(
        assign_mentions(sents, clusters, "d").annotation);
    CHECK(again == first);
  }
}
