#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "docamr/amr.hpp"
#include "docamr/document.hpp"

namespace docamr {

// Pronoun inventory with specificity tiers. Lower tier = more specific
// ("he" beats "someone"); ties within a tier break by first mention.
class PronounLexicon {
 public:
  static PronounLexicon builtin();
  static PronounLexicon load(const std::string& path);
  static PronounLexicon from_entries(
      const std::vector<std::pair<std::string, int>>& entries);

  bool is_pronoun(const std::string& concept_name) const {
    return tiers_.count(concept_name) != 0;
  }
  bool is_interlocutor(const std::string& concept_name) const {
    return concept_name == "i" || concept_name == "you";
  }
  // Lower = more specific. Unknown concepts rank after all known ones.
  int tier(const std::string& concept_name) const;

  std::vector<std::pair<std::string, int>> entries() const;

 private:
  std::map<std::string, int> tiers_;
};

// Partial order over AMR entity-type concepts, loaded from
// "child<TAB>parent" lines. Acyclic by construction (checked on load).
class EntityTypeOntology {
 public:
  static EntityTypeOntology builtin();
  static EntityTypeOntology load(const std::string& path);
  static EntityTypeOntology from_edges(
      const std::vector<std::pair<std::string, std::string>>& edges);

  bool contains(const std::string& type) const;
  // True when `ancestor` is reachable from `descendant` via parent links.
  bool is_strict_ancestor(const std::string& ancestor,
                          const std::string& descendant) const;

  std::vector<std::pair<std::string, std::string>> edges() const;

 private:
  void check_acyclic() const;
  std::map<std::string, std::set<std::string>> parents_;
  std::set<std::string> known_;
};

// Picks the root type for a merged named entity: ontology members that have
// no more-specific type present win; otherwise the most frequent type;
// frequency ties break by first mention. `types` lists member types in
// document order (with repeats).
std::string most_specific_type(const std::vector<std::string>& types,
                               const EntityTypeOntology& ontology);

enum class BuildMode { kDocamr, kMergeAll, kNoCoref, kNoMerge };

BuildMode parse_build_mode(const std::string& name);  // throws UsageError
std::string build_mode_name(BuildMode mode);

// How each pronominal chain member was resolved; drives the stats report.
enum class PronounOutcome {
  kMergedIntoPronoun,
  kMergedIntoInterlocutor,
  kMergedIntoOtherNode,
  kMergedIntoCorefEntity,
};

struct BuildStats {
  int nodes_in_chains = 0;
  int pronouns_in_chains = 0;
  int pronouns_into_pronoun = 0;
  int pronouns_into_interlocutor = 0;
  int pronouns_into_other_node = 0;
  int pronouns_into_coref_entity = 0;
  int nes_in_chains = 0;
  int nes_after_merge = 0;
};

// The unified document-level graph plus build bookkeeping.
struct DocGraph {
  AmrGraph graph;  // root concept is "document", ":snt<i>" edges per sentence
  BuildMode mode = BuildMode::kDocamr;
  int num_sentences = 0;
  std::vector<Var> sentence_roots;  // image of each sentence root, in order
  // forward reachability from each sentence root (1-based indices)
  std::map<Var, std::set<int>> provenance;
  // where every original node went; dropped pronouns map to their replacement
  std::map<NodeRef, Var> merge_map;
  BuildStats stats;

  void validate() const;  // DocGraph invariants, throws GraphError
};

// Action plan for one identity chain's pronominal members.
struct ChainPlan {
  enum Kind {
    kDropWithAntecedent,   // >=1 non-pronominal member: drop all pronouns
    kMergePronounOnly,     // pronoun-only: merge into most specific pronoun
    kInterlocutorEntity,   // pronoun-only, heterogeneous, refers to i/you
  } kind;
  // For kMergePronounOnly: index (into the chain) of the member whose
  // concept wins and whose node survives.
  int winner = -1;
  std::string winner_concept;
};

// Classifies a chain given per-member concepts and named-entity flags.
// Members are in document order.
ChainPlan resolve_pronouns(const std::vector<std::string>& member_concepts,
                           const std::vector<bool>& is_named_entity,
                           const PronounLexicon& lexicon);

// Builds the document-level graph for `doc` under `mode`.
DocGraph build(const Document& doc, BuildMode mode,
               const PronounLexicon& lexicon = PronounLexicon::builtin(),
               const EntityTypeOntology& ontology = EntityTypeOntology::builtin());

// Removes coref-entity nodes with fewer than two :coref in-edges and
// re-targets their remaining edges to the sole member. Exposed for tests;
// build() already applies it in docamr and no-merge modes.
void collapse_singletons(DocGraph& dg);

// Reconstructs a DocGraph from a parsed document-level PENMAN graph
// (root concept "document" with :snt<i> edges). Provenance is recomputed
// by forward reachability from the sentence roots. A graph without :snt
// edges is treated as a single-sentence document.
DocGraph doc_graph_from_penman(const AmrGraph& graph);

struct StatsReport {
  std::string doc_id;
  BuildStats stats;
};

// Table-style merge counters; `built` must come from `doc` in docamr mode.
StatsReport chain_statistics(const Document& doc, const DocGraph& built);

std::string stats_report_json(const StatsReport& report);

}  // namespace docamr
