#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "docamr/builder.hpp"

namespace docamr {

// Smatch's view of a graph: instance, attribute and relation triples plus
// per-variable sentence provenance. The document root and :snt<i> edges are
// ordinary triples. Exact duplicate triples are collapsed.
struct TripleSet {
  std::vector<Var> vars;  // sorted
  std::vector<std::string> concepts;              // per var
  std::vector<std::vector<std::pair<std::string, std::string>>>
      attributes;  // per var, sorted (role, unquoted value), deduplicated
  struct Rel {
    int source;
    std::string role;
    int target;
  };
  std::vector<Rel> relations;  // deduplicated, sorted
  std::vector<std::vector<int>> provenance;  // per var, sorted sentence ids
  int doc_root = -1;  // index of the document root, -1 when none

  // Coreference items: instance triples of coref-entity nodes and incoming
  // relation triples of nodes whose provenance spans two or more sentences;
  // :snt edges from the document root never qualify.
  std::vector<char> instance_is_coref;  // per var
  std::vector<char> relation_is_coref;  // per relation

  int var_index(const Var& v) const;
  int attribute_count() const;
  int relation_index(int s, const std::string& role, int t) const;
  int total_triples() const {
    return static_cast<int>(vars.size()) + attribute_count() +
           static_cast<int>(relations.size());
  }
  int coref_item_count() const;
};

TripleSet extract_triples(const DocGraph& graph);

struct SearchConfig {
  int restarts = 4;
  std::uint64_t seed = 0;
  bool constrained = false;
  int max_exact_nodes = 10;
};

// Partial injective map from source vars to target vars (-1 = unmapped).
struct NodeMapping {
  std::vector<int> to_target;
};

struct SmatchResult {
  // Orientation: "source" is the predicted graph, "target" the gold one,
  // so precision = matched / source and recall = matched / target.
  long long matched = 0;
  long long source_triples = 0;
  long long target_triples = 0;
  long long coref_correct = 0;
  long long coref_source = 0;
  long long coref_target = 0;
  int restarts_used = 0;
  double elapsed_ms = 0.0;

  double precision() const;
  double recall() const;
  double f1() const;
  double coref_precision() const;
  double coref_recall() const;
  double coref_f1() const;
};

// Candidate pool: for each source var, the sorted target vars whose mapping
// could add to the score. In constrained mode a source var whose provenance
// is exactly one sentence may only map to targets whose provenance includes
// that sentence; multi-sentence nodes are unrestricted.
std::vector<std::vector<int>> candidate_pool(const TripleSet& source,
                                             const TripleSet& target,
                                             bool constrained);

// Smart-initialized, steepest-ascent hill climbing with seeded random
// restarts. Deterministic for a given config.
std::pair<NodeMapping, SmatchResult> hill_climb(const TripleSet& source,
                                                const TripleSet& target,
                                                const SearchConfig& cfg);

// Exhaustive branch-and-bound search; usable when the smaller graph has at
// most cfg.max_exact_nodes variables, otherwise throws UsageError.
std::pair<NodeMapping, SmatchResult> exact_match(const TripleSet& source,
                                                 const TripleSet& target,
                                                 const SearchConfig& cfg);

struct SubScore {
  long long correct = 0;
  long long source_items = 0;
  long long target_items = 0;
};

// Coreference subscore under a fixed alignment: an item counts when it
// matches under the mapping and is a coreference item in both graphs.
SubScore coref_subscore(const TripleSet& source, const TripleSet& target,
                        const NodeMapping& mapping);

// Number of source triples matched by target triples under the mapping.
long long matched_triples(const TripleSet& source, const TripleSet& target,
                          const NodeMapping& mapping);

struct DocScore {
  std::string id;
  SmatchResult result;
};

struct CorpusResult {
  SmatchResult total;  // micro-averaged counts
  std::vector<DocScore> per_doc;
};

// Scores id-aligned corpora; counts are summed before computing P/R/F1.
// `threads` <= 0 means hardware concurrency.
CorpusResult score_corpus(const std::vector<DocGraph>& gold,
                          const std::vector<DocGraph>& pred,
                          const SearchConfig& cfg, int threads = 1);

}  // namespace docamr
