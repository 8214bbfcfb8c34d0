#pragma once

// Independent losslessness oracle: checks, from the Document and the
// merge_map alone, that every sentence triple survives into the built
// docamr graph, modulo the two documented exceptions (instance triples of
// dropped pronouns; name/wiki/type triples deduplicated or relocated by
// named-entity merging). Deliberately avoids the builder's internals.

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "docamr/builder.hpp"
#include "docamr/document.hpp"

namespace docamr::testutil {

inline std::vector<std::string> check_losslessness(
    const Document& doc, const DocGraph& dg,
    const PronounLexicon& lex = PronounLexicon::builtin()) {
  std::vector<std::string> violations;

  std::set<std::tuple<Var, std::string, Var>> out_rels;
  for (const Relation& r : dg.graph.relations)
    out_rels.emplace(r.source, r.role, r.target);
  std::set<std::tuple<Var, std::string, std::string>> out_attrs;
  for (const Attribute& a : dg.graph.attributes)
    out_attrs.emplace(a.source, a.role, a.value);

  auto mapped = [&](const NodeRef& ref) -> Var {
    auto it = dg.merge_map.find(ref);
    if (it == dg.merge_map.end()) return "";
    return it->second;
  };

  // Re-derive each chain's pronoun plan to know which instances may vanish.
  std::set<NodeRef> instance_may_vanish;  // dropped / merged-away pronouns
  std::set<NodeRef> ne_member;            // instances relocated by NE merge
  for (const IdentityChain& chain : doc.annotation.chains) {
    std::vector<std::string> concepts;
    std::vector<bool> is_ne;
    for (const NodeRef& m : chain.members) {
      const AmrGraph& s = doc.sentence(m.sent_id);
      concepts.push_back(s.concept_of(m.var));
      bool named = false;
      for (const Relation& r : s.relations)
        if (r.source == m.var && r.role == ":name") named = true;
      is_ne.push_back(named);
    }
    ChainPlan plan = resolve_pronouns(concepts, is_ne, lex);
    int ne_count = 0;
    for (bool b : is_ne) ne_count += b ? 1 : 0;
    for (size_t j = 0; j < chain.members.size(); ++j) {
      bool pronominal = !is_ne[j] && lex.is_pronoun(concepts[j]);
      switch (plan.kind) {
        case ChainPlan::kDropWithAntecedent:
          if (pronominal) instance_may_vanish.insert(chain.members[j]);
          break;
        case ChainPlan::kMergePronounOnly:
          if (static_cast<int>(j) != plan.winner)
            instance_may_vanish.insert(chain.members[j]);
          break;
        case ChainPlan::kInterlocutorEntity:
          instance_may_vanish.insert(chain.members[j]);
          break;
      }
      if (is_ne[j] && ne_count >= 2) ne_member.insert(chain.members[j]);
    }
  }

  for (const AmrGraph& s : doc.sentences) {
    for (const Relation& r : s.relations) {
      Var ms = mapped({s.id, r.source});
      Var mt = mapped({s.id, r.target});
      if (ms.empty() || mt.empty()) {
        violations.push_back("merge_map missing for a node of relation (" +
                             r.source + ", " + r.role + ", " + r.target +
                             ") in " + s.id);
        continue;
      }
      if (!out_rels.count({ms, r.role, mt}))
        violations.push_back("lost relation (" + s.id + ": " + r.source +
                             ", " + r.role + ", " + r.target + ") -> (" +
                             ms + ", " + r.role + ", " + mt + ")");
    }
    for (const Attribute& a : s.attributes) {
      Var ms = mapped({s.id, a.source});
      if (ms.empty()) {
        violations.push_back("merge_map missing for attribute source " +
                             a.source + " in " + s.id);
        continue;
      }
      if (!out_attrs.count({ms, a.role, a.value}))
        violations.push_back("lost attribute (" + s.id + ": " + a.source +
                             ", " + a.role + ", " + a.value + ")");
    }
    for (const auto& [v, concept_name] : s.instances) {
      NodeRef ref{s.id, v};
      Var mv = mapped(ref);
      if (mv.empty()) {
        violations.push_back("merge_map missing for node " + v + " in " +
                             s.id);
        continue;
      }
      if (instance_may_vanish.count(ref)) continue;  // documented exception
      auto it = dg.graph.instances.find(mv);
      if (it == dg.graph.instances.end()) {
        violations.push_back("mapped node " + mv + " of (" + s.id + ", " +
                             v + ") has no instance");
        continue;
      }
      if (it->second == concept_name) continue;
      if (ne_member.count(ref)) {
        // The type may live on an :additional-type node off the merged NE.
        bool found = false;
        for (const Relation& r : dg.graph.relations)
          if (r.source == mv && r.role == ":additional-type" &&
              dg.graph.instances.count(r.target) &&
              dg.graph.instances.at(r.target) == concept_name)
            found = true;
        if (found) continue;
      }
      violations.push_back("lost instance (" + s.id + ", " + v + ", " +
                           concept_name + "): mapped to " + mv +
                           " with concept " + it->second);
    }
  }
  return violations;
}

}  // namespace docamr::testutil
