#pragma once

#include <string>
#include <vector>

#include "docamr/document.hpp"

namespace docamr {

// A text mention: token span inside one sentence, end inclusive.
struct Mention {
  std::string sent_id;
  int start = 0;
  int end = 0;
};

struct MentionCluster {
  std::string id;
  std::vector<Mention> mentions;
};

// Node-to-span alignment: the smallest token interval covering all tokens
// aligned to the node's subtree after re-entrancy removal.
struct NodeSpan {
  Var variable;
  int start = 0;
  int end = 0;
  int height = 0;  // max depth below the node in the re-entrancy-free tree
};

// Converts node-to-token alignments into node-to-span alignments.
// Re-entrant edges are removed keeping the first edge encountered in a
// depth-first traversal from the root with children in printed order.
// Requires tokens metadata; nodes whose subtree has no aligned token yield
// no NodeSpan.
std::vector<NodeSpan> node_spans(const AmrGraph& graph);

struct InjectResult {
  DocumentAnnotation annotation;
  int total_mentions = 0;
  int assigned_mentions = 0;
  int dropped_mentions = 0;
  std::vector<std::string> warnings;
};

// Assigns each mention to the node with the shortest containing span (ties
// broken by greatest height), drops unanchored mentions with a warning, and
// discards clusters whose surviving mentions all lie in one sentence.
InjectResult assign_mentions(const std::vector<AmrGraph>& sentences,
                             const std::vector<MentionCluster>& clusters,
                             const std::string& doc_id = "doc");

// Mention-cluster input JSON:
//   {"doc_id": "...",
//    "clusters": [{"id":"c0","mentions":[{"sent":"s1","start":3,"end":4}]}]}
struct MentionFile {
  std::string doc_id;
  std::vector<MentionCluster> clusters;
};

MentionFile parse_mentions_json(const std::string& text);
std::string serialize_mentions_json(const MentionFile& file);

}  // namespace docamr
