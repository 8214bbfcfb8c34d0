#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "docamr/amr.hpp"

namespace docamr {

// Parses a sequence of blank-line-separated PENMAN blocks, each optionally
// preceded by "# ::key value" metadata lines. Inverse roles are normalized,
// inline alignment markers ("concept~1" or "~e.3,4") fill the alignments map.
std::vector<AmrGraph> parse_penman(std::string_view text);

// Parses text containing exactly one graph.
AmrGraph parse_penman_one(std::string_view text);

// Reads a PENMAN document file from disk.
std::vector<AmrGraph> parse_penman_file(const std::string& path);

// Serializes one graph. Children of a node are ordered by (role label,
// original occurrence); indentation is 4 spaces per depth level.
// Re-entrancies print as bare variable references. Throws GraphError when
// the graph is disconnected, naming the unreachable variables.
std::string print_penman(const AmrGraph& graph, bool with_metadata = true);

// Serializes several graphs separated by blank lines.
std::string print_penman_file(const std::vector<AmrGraph>& graphs);

// The spanning tree the printer uses: per node, the ordered tree children
// plus reference edges. Shared with the injector's re-entrancy removal,
// which keeps the first edge encountered in this traversal.
struct SpanningTree {
  // parallel to graph.relations: true when the relation introduces its
  // child node in the printed tree
  std::vector<char> is_tree_edge;
  // per variable, the relation indices of its tree children, in print order
  std::map<Var, std::vector<int>> tree_children;
  // per variable, relation indices printed at this node as bare references
  std::map<Var, std::vector<int>> ref_edges;
  // visit order of variables
  std::vector<Var> visit_order;
};

SpanningTree print_spanning_tree(const AmrGraph& graph);

}  // namespace docamr
