#include "docamr/builder.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "docamr/errors.hpp"

namespace docamr {

// ---------------------------------------------------------------------------
// Pronoun lexicon

namespace {

const std::vector<std::pair<std::string, int>>& builtin_pronouns() {
  static const std::vector<std::pair<std::string, int>> entries = {
      {"i", 1},        {"you", 1},      {"he", 1},         {"she", 1},
      {"it", 1},       {"we", 1},       {"they", 1},       {"this", 2},
      {"that", 2},     {"these", 2},    {"those", 2},      {"someone", 3},
      {"anyone", 3},   {"everyone", 3}, {"nobody", 3},     {"something", 4},
      {"anything", 4}, {"everything", 4}, {"nothing", 4},  {"one", 5},
  };
  return entries;
}

std::vector<std::pair<std::string, std::string>> builtin_entity_types() {
  std::vector<std::pair<std::string, std::string>> edges;
  auto group = [&](const std::string& parent,
                   std::initializer_list<const char*> children) {
    for (const char* c : children) edges.emplace_back(c, parent);
  };
  group("thing",
        {"person", "family", "animal", "plant", "organization", "location",
         "facility", "event", "product", "publication", "natural-object",
         "language", "nationality", "ethnic-group", "regional-group",
         "religious-group", "political-movement"});
  group("organization",
        {"company", "government-organization", "military",
         "criminal-organization", "political-party", "market-sector",
         "school", "university", "research-institute", "team", "league"});
  group("location",
        {"city", "city-district", "county", "state", "province", "territory",
         "country", "local-region", "country-region", "world-region",
         "continent", "ocean", "sea", "lake", "river", "gulf", "bay",
         "strait", "peninsula", "mountain", "volcano", "valley", "canyon",
         "island", "desert", "forest", "moon", "planet", "star",
         "constellation"});
  group("facility",
        {"airport", "station", "port", "tunnel", "bridge", "road",
         "railway-line", "canal", "building", "theater", "museum", "palace",
         "hotel", "worship-place", "market", "sports-facility", "park",
         "zoo", "amusement-park"});
  group("event", {"incident", "natural-disaster", "earthquake", "war",
                  "conference", "game", "festival"});
  group("product", {"vehicle", "ship", "aircraft", "aircraft-type",
                    "spaceship", "work-of-art", "picture", "music", "show",
                    "broadcast-program"});
  group("publication", {"book", "newspaper", "magazine", "journal"});
  return edges;
}

}  // namespace

PronounLexicon PronounLexicon::builtin() {
  return from_entries(builtin_pronouns());
}

PronounLexicon PronounLexicon::from_entries(
    const std::vector<std::pair<std::string, int>>& entries) {
  PronounLexicon lex;
  for (const auto& [name, tier] : entries) lex.tiers_[name] = tier;
  return lex;
}

PronounLexicon PronounLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open pronoun lexicon: " + path);
  std::vector<std::pair<std::string, int>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw UsageError("malformed pronoun lexicon line: " + line);
    entries.emplace_back(line.substr(0, tab),
                         std::stoi(line.substr(tab + 1)));
  }
  return from_entries(entries);
}

int PronounLexicon::tier(const std::string& concept_name) const {
  auto it = tiers_.find(concept_name);
  if (it == tiers_.end()) return 1 << 20;
  return it->second;
}

std::vector<std::pair<std::string, int>> PronounLexicon::entries() const {
  return {tiers_.begin(), tiers_.end()};
}

// ---------------------------------------------------------------------------
// Entity type ontology

EntityTypeOntology EntityTypeOntology::builtin() {
  return from_edges(builtin_entity_types());
}

EntityTypeOntology EntityTypeOntology::from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges) {
  EntityTypeOntology onto;
  for (const auto& [child, parent] : edges) {
    onto.parents_[child].insert(parent);
    onto.known_.insert(child);
    onto.known_.insert(parent);
  }
  onto.check_acyclic();
  return onto;
}

EntityTypeOntology EntityTypeOntology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open entity type ontology: " + path);
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw UsageError("malformed ontology line: " + line);
    edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return from_edges(edges);
}

bool EntityTypeOntology::contains(const std::string& type) const {
  return known_.count(type) != 0;
}

bool EntityTypeOntology::is_strict_ancestor(
    const std::string& ancestor, const std::string& descendant) const {
  if (ancestor == descendant) return false;
  std::deque<std::string> queue{descendant};
  std::set<std::string> seen{descendant};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    auto it = parents_.find(cur);
    if (it == parents_.end()) continue;
    for (const std::string& p : it->second) {
      if (p == ancestor) return true;
      if (seen.insert(p).second) queue.push_back(p);
    }
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> EntityTypeOntology::edges()
    const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [child, parents] : parents_)
    for (const std::string& p : parents) out.emplace_back(child, p);
  return out;
}

void EntityTypeOntology::check_acyclic() const {
  for (const std::string& start : known_) {
    std::deque<std::string> queue{start};
    std::set<std::string> seen;
    while (!queue.empty()) {
      std::string cur = queue.front();
      queue.pop_front();
      auto it = parents_.find(cur);
      if (it == parents_.end()) continue;
      for (const std::string& p : it->second) {
        if (p == start)
          throw UsageError("entity type ontology contains a cycle at '" +
                           start + "'");
        if (seen.insert(p).second) queue.push_back(p);
      }
    }
  }
}

std::string most_specific_type(const std::vector<std::string>& types,
                               const EntityTypeOntology& ontology) {
  if (types.empty()) throw UsageError("most_specific_type: empty type list");

  std::vector<std::string> distinct;  // by first occurrence
  std::map<std::string, int> counts;
  for (const std::string& t : types) {
    if (!counts.count(t)) distinct.push_back(t);
    counts[t]++;
  }

  std::vector<std::string> candidates;
  for (const std::string& t : distinct)
    if (ontology.contains(t)) candidates.push_back(t);
  if (!candidates.empty()) {
    // Keep the most specific ones: drop any type that is a strict ancestor
    // of another present ontology type.
    std::vector<std::string> minimal;
    for (const std::string& t : candidates) {
      bool has_descendant = false;
      for (const std::string& s : candidates)
        if (s != t && ontology.is_strict_ancestor(t, s)) {
          has_descendant = true;
          break;
        }
      if (!has_descendant) minimal.push_back(t);
    }
    candidates = minimal;
  } else {
    candidates = distinct;
  }

  // Most frequent; frequency ties break by first mention (candidates are in
  // first-occurrence order already).
  std::string best = candidates.front();
  for (const std::string& t : candidates)
    if (counts[t] > counts[best]) best = t;
  return best;
}

// ---------------------------------------------------------------------------
// Modes and pronoun resolution

BuildMode parse_build_mode(const std::string& name) {
  if (name == "docamr") return BuildMode::kDocamr;
  if (name == "merge-all") return BuildMode::kMergeAll;
  if (name == "no-coref") return BuildMode::kNoCoref;
  if (name == "no-merge") return BuildMode::kNoMerge;
  throw UsageError("unknown build mode '" + name +
                   "' (expected docamr, merge-all, no-coref, no-merge)");
}

std::string build_mode_name(BuildMode mode) {
  switch (mode) {
    case BuildMode::kDocamr: return "docamr";
    case BuildMode::kMergeAll: return "merge-all";
    case BuildMode::kNoCoref: return "no-coref";
    case BuildMode::kNoMerge: return "no-merge";
  }
  return "?";
}

ChainPlan resolve_pronouns(const std::vector<std::string>& member_concepts,
                           const std::vector<bool>& is_named_entity,
                           const PronounLexicon& lexicon) {
  size_t n = member_concepts.size();
  std::vector<bool> pronominal(n, false);
  bool any_content = false;
  for (size_t j = 0; j < n; ++j) {
    pronominal[j] = !is_named_entity[j] && lexicon.is_pronoun(member_concepts[j]);
    if (!pronominal[j]) any_content = true;
  }
  if (any_content) return ChainPlan{ChainPlan::kDropWithAntecedent, -1, ""};

  std::set<std::string> distinct(member_concepts.begin(),
                                 member_concepts.end());
  bool heterogeneous = distinct.size() >= 2;
  bool interlocutor = false;
  for (const std::string& c : member_concepts)
    if (lexicon.is_interlocutor(c)) interlocutor = true;
  if (heterogeneous && interlocutor)
    return ChainPlan{ChainPlan::kInterlocutorEntity, -1, ""};

  int winner = 0;
  for (size_t j = 1; j < n; ++j)
    if (lexicon.tier(member_concepts[j]) <
        lexicon.tier(member_concepts[winner]))
      winner = static_cast<int>(j);
  return ChainPlan{ChainPlan::kMergePronounOnly, winner,
                   member_concepts[winner]};
}

// ---------------------------------------------------------------------------
// Build

namespace {

Var resolve_var(const std::map<Var, Var>& redirect, Var v) {
  int guard = 0;
  for (auto it = redirect.find(v); it != redirect.end();
       it = redirect.find(v)) {
    v = it->second;
    if (++guard > 1000) throw GraphError("redirect cycle at '" + v + "'");
  }
  return v;
}

struct SpecialEdge {
  Var source;
  std::string role;
  Var target;
  // :coref-instance and :additional-type point at designated leaf nodes
  // that are themselves redirect sources; their targets must stay literal.
  bool literal_target = false;
};

struct ChainRecord {
  std::string id;
  ChainPlan::Kind kind = ChainPlan::kDropWithAntecedent;
  int pronoun_members = 0;
  int ne_members = 0;
  Var coref_entity;  // empty when none was created
};

void compute_provenance(DocGraph& dg) {
  dg.provenance.clear();
  std::map<Var, std::vector<Var>> out;
  for (const Relation& r : dg.graph.relations)
    out[r.source].push_back(r.target);
  for (const auto& [v, c] : dg.graph.instances) dg.provenance[v];  // empty
  for (int k = 0; k < static_cast<int>(dg.sentence_roots.size()); ++k) {
    std::deque<Var> queue{dg.sentence_roots[k]};
    std::set<Var> seen{dg.sentence_roots[k]};
    while (!queue.empty()) {
      Var v = queue.front();
      queue.pop_front();
      if (v == dg.graph.root) continue;  // never traverse through doc root
      dg.provenance[v].insert(k + 1);
      for (const Var& u : out[v])
        if (seen.insert(u).second) queue.push_back(u);
    }
  }
}

std::string name_signature(const AmrGraph& g, const Var& name_var) {
  std::vector<std::string> parts;
  parts.push_back(g.concept_of(name_var));
  std::vector<std::string> attrs;
  for (const Attribute& a : g.attributes)
    if (a.source == name_var) attrs.push_back(a.role + "=" + a.value);
  std::sort(attrs.begin(), attrs.end());
  for (auto& s : attrs) parts.push_back(s);
  std::vector<std::string> rels;
  for (const Relation& r : g.relations)
    if (r.source == name_var)
      rels.push_back(r.role + ">" + g.concept_of(r.target));
  std::sort(rels.begin(), rels.end());
  for (auto& s : rels) parts.push_back(s);
  std::string sig;
  for (const std::string& p : parts) sig += p + "\x1f";
  return sig;
}

}  // namespace

DocGraph build(const Document& doc, BuildMode mode,
               const PronounLexicon& lexicon,
               const EntityTypeOntology& ontology) {
  validate_document(doc);

  DocGraph dg;
  dg.mode = mode;
  dg.num_sentences = static_cast<int>(doc.sentences.size());

  AmrGraph& g = dg.graph;
  g.id = doc.doc_id;

  // Assemble: rename sentence variables to "s<i>.<orig>" and copy triples
  // in original order.
  std::vector<Var> sent_root(doc.sentences.size());
  std::map<std::string, int> sent_index;
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    const AmrGraph& s = doc.sentences[i];
    sent_index[s.id] = static_cast<int>(i);
    std::string prefix = "s" + std::to_string(i + 1) + ".";
    for (const auto& [v, c] : s.instances) g.instances[prefix + v] = c;
    sent_root[i] = prefix + s.root;

    struct Item {
      int seq;
      bool is_rel;
      size_t idx;
    };
    std::vector<Item> items;
    for (size_t k = 0; k < s.attributes.size(); ++k)
      items.push_back({s.attributes[k].seq, false, k});
    for (size_t k = 0; k < s.relations.size(); ++k)
      items.push_back({s.relations[k].seq, true, k});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.seq < b.seq; });
    for (const Item& item : items) {
      if (item.is_rel) {
        const Relation& r = s.relations[item.idx];
        g.add_relation(prefix + r.source, r.role, prefix + r.target,
                       r.inverted);
      } else {
        const Attribute& a = s.attributes[item.idx];
        g.add_attribute(prefix + a.source, a.role, a.value);
      }
    }
  }

  const Var doc_root = "d";
  g.root = doc_root;
  g.instances[doc_root] = "document";

  auto doc_var = [&](const NodeRef& ref) -> Var {
    auto it = sent_index.find(ref.sent_id);
    if (it == sent_index.end())
      throw IngestError("unknown sentence id '" + ref.sent_id + "'");
    return "s" + std::to_string(it->second + 1) + "." + ref.var;
  };

  std::map<Var, Var> redirect;
  std::set<Var> removed;  // variables whose instance triple is dropped
  std::vector<SpecialEdge> specials;
  std::map<std::string, Var> chain_rep;
  std::vector<ChainRecord> records;

  auto has_name_edge = [&](const Var& v) {
    for (const Relation& r : g.relations)
      if (r.source == v && r.role == ":name") return true;
    return false;
  };

  if (mode != BuildMode::kNoCoref) {
    for (size_t k = 0; k < doc.annotation.chains.size(); ++k) {
      const IdentityChain& chain = doc.annotation.chains[k];
      ChainRecord record;
      record.id = chain.id;

      std::vector<Var> mv;
      for (const NodeRef& m : chain.members) mv.push_back(doc_var(m));

      if (mode == BuildMode::kMergeAll) {
        Var merged = mv[0];
        std::set<std::string> present{g.concept_of(merged)};
        for (size_t j = 1; j < mv.size(); ++j) {
          const std::string& c = g.concept_of(mv[j]);
          redirect[mv[j]] = merged;
          if (present.insert(c).second) {
            // new distinct concept: keep the node as an extra-form leaf
            specials.push_back({merged, ":coref-instance", mv[j], true});
          } else {
            removed.insert(mv[j]);
          }
        }
        for (size_t j = 0; j < mv.size(); ++j)
          dg.merge_map[chain.members[j]] = merged;
        chain_rep[chain.id] = merged;
        records.push_back(record);
        continue;
      }

      if (mode == BuildMode::kNoMerge) {
        Var ce = "ce" + std::to_string(k);
        g.instances[ce] = "coref-entity";
        for (size_t j = 0; j < mv.size(); ++j) {
          specials.push_back({mv[j], ":coref", ce});
          dg.merge_map[chain.members[j]] = mv[j];
        }
        chain_rep[chain.id] = ce;
        record.coref_entity = ce;
        records.push_back(record);
        continue;
      }

      // docamr mode
      std::vector<bool> is_ne(mv.size());
      std::vector<std::string> concepts(mv.size());
      for (size_t j = 0; j < mv.size(); ++j) {
        is_ne[j] = has_name_edge(mv[j]);
        concepts[j] = g.concept_of(mv[j]);
        record.ne_members += is_ne[j] ? 1 : 0;
      }

      // Named entity merge: all NE members collapse into one node carrying
      // the most specific type; other distinct types hang off it via
      // :additional-type; duplicate name subgraphs deduplicate.
      Var ne_kept;
      if (record.ne_members >= 2) {
        std::vector<size_t> ne_idx;
        std::vector<std::string> types;
        for (size_t j = 0; j < mv.size(); ++j)
          if (is_ne[j]) {
            ne_idx.push_back(j);
            types.push_back(concepts[j]);
          }
        std::string root_type = most_specific_type(types, ontology);
        for (size_t j : ne_idx)
          if (concepts[j] == root_type) {
            ne_kept = mv[j];
            break;
          }

        std::map<std::string, Var> type_carrier{{root_type, ne_kept}};
        std::map<std::string, Var> name_seen;
        for (const Relation& r : g.relations)
          if (r.source == ne_kept && r.role == ":name")
            name_seen.emplace(name_signature(g, r.target), r.target);

        for (size_t j : ne_idx) {
          if (mv[j] == ne_kept) continue;
          redirect[mv[j]] = ne_kept;
          auto [it, inserted] = type_carrier.emplace(concepts[j], mv[j]);
          if (inserted) {
            specials.push_back({ne_kept, ":additional-type", mv[j], true});
          } else {
            removed.insert(mv[j]);
          }
          for (const Relation& r : g.relations) {
            if (r.source != mv[j] || r.role != ":name") continue;
            std::string sig = name_signature(g, r.target);
            auto [nit, fresh] = name_seen.emplace(sig, r.target);
            if (!fresh && nit->second != r.target) {
              redirect[r.target] = nit->second;
              removed.insert(r.target);
            }
          }
        }
      }

      ChainPlan plan = resolve_pronouns(concepts, is_ne, lexicon);
      record.kind = plan.kind;
      for (size_t j = 0; j < mv.size(); ++j)
        if (!is_ne[j] && lexicon.is_pronoun(concepts[j]))
          record.pronoun_members++;

      switch (plan.kind) {
        case ChainPlan::kDropWithAntecedent: {
          Var ce = "ce" + std::to_string(k);
          g.instances[ce] = "coref-entity";
          record.coref_entity = ce;
          std::vector<Var> surviving;
          for (size_t j = 0; j < mv.size(); ++j) {
            bool pronominal = !is_ne[j] && lexicon.is_pronoun(concepts[j]);
            if (pronominal) {
              redirect[mv[j]] = ce;
              removed.insert(mv[j]);
              dg.merge_map[chain.members[j]] = ce;
            } else {
              Var s = resolve_var(redirect, mv[j]);
              if (std::find(surviving.begin(), surviving.end(), s) ==
                  surviving.end())
                surviving.push_back(s);
              dg.merge_map[chain.members[j]] = s;
            }
          }
          for (const Var& s : surviving) specials.push_back({s, ":coref", ce});
          chain_rep[chain.id] = ce;
          break;
        }
        case ChainPlan::kMergePronounOnly: {
          Var winner = mv[plan.winner];
          for (size_t j = 0; j < mv.size(); ++j) {
            if (static_cast<int>(j) == plan.winner) {
              dg.merge_map[chain.members[j]] = winner;
              continue;
            }
            redirect[mv[j]] = winner;
            removed.insert(mv[j]);
            dg.merge_map[chain.members[j]] = winner;
          }
          chain_rep[chain.id] = winner;
          break;
        }
        case ChainPlan::kInterlocutorEntity: {
          Var ie = "ie" + std::to_string(k);
          g.instances[ie] = "interlocutor-entity";
          for (size_t j = 0; j < mv.size(); ++j) {
            redirect[mv[j]] = ie;
            removed.insert(mv[j]);
            dg.merge_map[chain.members[j]] = ie;
          }
          chain_rep[chain.id] = ie;
          break;
        }
      }
      records.push_back(record);
    }

    // Cross-sentential edges for implicit roles and bridging relations.
    auto rep_of = [&](const TargetRef& t) -> Var {
      if (t.is_chain()) {
        auto it = chain_rep.find(t.chain_id);
        if (it == chain_rep.end())
          throw IngestError("unknown chain '" + t.chain_id + "'");
        return it->second;
      }
      return resolve_var(redirect, doc_var(*t.node));
    };
    for (const ImplicitRole& role : doc.annotation.implicit_roles) {
      Var pred = resolve_var(redirect, doc_var(role.predicate));
      specials.push_back({pred, role.role, rep_of(role.target)});
    }
    for (const BridgingRelation& rel : doc.annotation.bridging) {
      std::string label =
          rel.kind == BridgingKind::kPartWhole ? ":part" : ":subset";
      specials.push_back({rep_of(rel.parent), label, rep_of(rel.child)});
    }
  }

  // Rewrite endpoints through the redirect map, drop removed instances,
  // then add :snt edges and the document-level special edges.
  AmrGraph out;
  out.id = g.id;
  out.root = doc_root;
  for (const auto& [v, c] : g.instances)
    if (!removed.count(v)) out.instances[v] = c;

  dg.sentence_roots.clear();
  for (size_t i = 0; i < sent_root.size(); ++i) {
    Var target = resolve_var(redirect, sent_root[i]);
    out.add_relation(doc_root, ":snt" + std::to_string(i + 1), target);
    dg.sentence_roots.push_back(target);
  }

  std::set<std::tuple<Var, std::string, Var>> rel_seen;
  for (const Relation& r : g.relations) {
    Var s = resolve_var(redirect, r.source);
    Var t = resolve_var(redirect, r.target);
    if (rel_seen.emplace(s, r.role, t).second)
      out.add_relation(s, r.role, t, r.inverted);
  }
  std::set<std::tuple<Var, std::string, std::string>> attr_seen;
  for (const Attribute& a : g.attributes) {
    Var s = resolve_var(redirect, a.source);
    if (attr_seen.emplace(s, a.role, a.value).second)
      out.add_attribute(s, a.role, a.value);
  }
  for (const SpecialEdge& e : specials) {
    Var s = resolve_var(redirect, e.source);
    Var t = e.literal_target ? e.target : resolve_var(redirect, e.target);
    if (rel_seen.emplace(s, e.role, t).second) out.add_relation(s, e.role, t);
  }

  dg.graph = std::move(out);
  for (auto& [ref, v] : dg.merge_map) v = resolve_var(redirect, v);
  // Nodes untouched by any rule map to their renamed selves.
  for (size_t i = 0; i < doc.sentences.size(); ++i) {
    std::string prefix = "s" + std::to_string(i + 1) + ".";
    for (const auto& [v, c] : doc.sentences[i].instances) {
      NodeRef ref{doc.sentences[i].id, v};
      if (!dg.merge_map.count(ref))
        dg.merge_map[ref] = resolve_var(redirect, prefix + v);
    }
  }

  if (mode == BuildMode::kDocamr || mode == BuildMode::kNoMerge)
    collapse_singletons(dg);
  else
    compute_provenance(dg);

  // Stats (meaningful for docamr mode).
  if (mode == BuildMode::kDocamr) {
    BuildStats& st = dg.stats;
    for (size_t k = 0; k < doc.annotation.chains.size(); ++k) {
      const ChainRecord& record = records[k];
      st.nodes_in_chains +=
          static_cast<int>(doc.annotation.chains[k].members.size());
      st.nes_in_chains += record.ne_members;
      if (record.ne_members >= 1) st.nes_after_merge += 1;
      st.pronouns_in_chains += record.pronoun_members;
      switch (record.kind) {
        case ChainPlan::kMergePronounOnly:
          st.pronouns_into_pronoun += record.pronoun_members;
          break;
        case ChainPlan::kInterlocutorEntity:
          st.pronouns_into_interlocutor += record.pronoun_members;
          break;
        case ChainPlan::kDropWithAntecedent:
          if (!record.coref_entity.empty() &&
              dg.graph.instances.count(record.coref_entity))
            st.pronouns_into_coref_entity += record.pronoun_members;
          else
            st.pronouns_into_other_node += record.pronoun_members;
          break;
      }
    }
  }

  dg.graph.validate();
  return dg;
}

void collapse_singletons(DocGraph& dg) {
  AmrGraph& g = dg.graph;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Var> entities;
    for (const auto& [v, c] : g.instances)
      if (c == "coref-entity") entities.push_back(v);
    for (const Var& ce : entities) {
      std::vector<size_t> in_coref;
      for (size_t i = 0; i < g.relations.size(); ++i)
        if (g.relations[i].target == ce && g.relations[i].role == ":coref")
          in_coref.push_back(i);
      if (in_coref.size() >= 2) continue;
      if (in_coref.empty())
        throw GraphError("coref-entity '" + ce +
                         "' has no :coref member to collapse onto");
      Var member = g.relations[in_coref[0]].source;

      std::vector<Relation> rels;
      std::set<std::tuple<Var, std::string, Var>> seen;
      for (size_t i = 0; i < g.relations.size(); ++i) {
        if (i == in_coref[0]) continue;
        Relation r = g.relations[i];
        if (r.source == ce) r.source = member;
        if (r.target == ce) r.target = member;
        if (seen.emplace(r.source, r.role, r.target).second)
          rels.push_back(r);
      }
      g.relations = std::move(rels);
      for (Attribute& a : g.attributes)
        if (a.source == ce) a.source = member;
      g.instances.erase(ce);
      for (auto& [ref, v] : dg.merge_map)
        if (v == ce) v = member;
      for (Var& v : dg.sentence_roots)
        if (v == ce) v = member;
      changed = true;
    }
  }
  compute_provenance(dg);
}

void DocGraph::validate() const {
  graph.validate();
  if (graph.concept_of(graph.root) != "document")
    throw GraphError("document root concept must be 'document'");
  std::set<int> snt_seen;
  for (const Relation& r : graph.relations) {
    if (r.source != graph.root || r.role.rfind(":snt", 0) != 0) continue;
    std::string num = r.role.substr(4);
    if (num.empty() ||
        !std::all_of(num.begin(), num.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    if (!snt_seen.insert(std::stoi(num)).second)
      throw GraphError("duplicate " + r.role + " edge on document root");
  }
  for (int i = 1; i <= num_sentences; ++i)
    if (!snt_seen.count(i))
      throw GraphError("missing :snt" + std::to_string(i) +
                       " edge on document root");
  for (const auto& [v, c] : graph.instances) {
    if (c != "coref-entity") continue;
    int in_coref = 0;
    for (const Relation& r : graph.relations)
      if (r.target == v && r.role == ":coref") ++in_coref;
    if (in_coref < 2)
      throw GraphError("coref-entity '" + v + "' has " +
                       std::to_string(in_coref) + " :coref in-edges");
  }
}

DocGraph doc_graph_from_penman(const AmrGraph& graph) {
  DocGraph dg;
  dg.graph = graph;
  std::map<int, Var> roots;
  for (const Relation& r : graph.relations) {
    if (r.source != graph.root || r.role.rfind(":snt", 0) != 0) continue;
    std::string num = r.role.substr(4);
    if (num.empty() ||
        !std::all_of(num.begin(), num.end(),
                     [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    int k = std::stoi(num);
    if (roots.count(k))
      throw GraphError("duplicate :snt" + num + " edge in document graph");
    roots[k] = r.target;
  }
  if (roots.empty()) {
    // Plain sentence graph: treat as a one-sentence document.
    dg.num_sentences = 1;
    dg.sentence_roots = {graph.root};
  } else {
    int n = roots.rbegin()->first;
    for (int i = 1; i <= n; ++i)
      if (!roots.count(i))
        throw GraphError("document graph is missing :snt" +
                         std::to_string(i));
    dg.num_sentences = n;
    for (int i = 1; i <= n; ++i) dg.sentence_roots.push_back(roots[i]);
  }
  compute_provenance(dg);
  return dg;
}

StatsReport chain_statistics(const Document& doc, const DocGraph& built) {
  if (built.mode != BuildMode::kDocamr)
    throw UsageError("chain statistics require a graph built in docamr mode");
  if (built.num_sentences != static_cast<int>(doc.sentences.size()))
    throw UsageError("graph was not built from this document");
  StatsReport report;
  report.doc_id = doc.doc_id;
  report.stats = built.stats;
  return report;
}

std::string stats_report_json(const StatsReport& report) {
  const BuildStats& s = report.stats;
  std::ostringstream out;
  out << "{\n";
  out << "  \"doc_id\": \"" << report.doc_id << "\",\n";
  out << "  \"nodes_in_chains\": " << s.nodes_in_chains << ",\n";
  out << "  \"pronouns_in_chains\": " << s.pronouns_in_chains << ",\n";
  out << "  \"pronouns_merged_into\": {\n";
  out << "    \"pronoun\": " << s.pronouns_into_pronoun << ",\n";
  out << "    \"interlocutor_entity\": " << s.pronouns_into_interlocutor
      << ",\n";
  out << "    \"other_node\": " << s.pronouns_into_other_node << ",\n";
  out << "    \"coref_entity\": " << s.pronouns_into_coref_entity << "\n";
  out << "  },\n";
  out << "  \"nes_in_chains\": " << s.nes_in_chains << ",\n";
  out << "  \"nes_after_merge\": " << s.nes_after_merge << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace docamr
