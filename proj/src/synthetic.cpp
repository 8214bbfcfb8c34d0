#include "docamr/synthetic.hpp"

#include <algorithm>
#include <deque>

#include "docamr/errors.hpp"

namespace docamr {

std::uint64_t Rng::next() {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::bounded(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

const std::vector<std::string>& content_concepts() {
  static const std::vector<std::string> pool = {
      "run-02",  "see-01",  "want-01", "go-02",   "give-01", "say-01",
      "person",  "dog",     "house",   "book",    "water",   "tree",
      "good",    "now",     "tomorrow"};
  return pool;
}

const std::vector<std::string>& pronoun_concepts() {
  static const std::vector<std::string> pool = {"he",  "it",      "they",
                                                "she", "someone", "i",
                                                "you", "something"};
  return pool;
}

const std::vector<std::string>& entity_types() {
  static const std::vector<std::string> pool = {
      "person", "city", "country", "company", "organization",
      "criminal-organization"};
  return pool;
}

const std::vector<std::string>& name_ops() {
  static const std::vector<std::string> pool = {
      "\"Alpha\"", "\"Bravo\"", "\"Delta\"", "\"Kilo\"", "\"Lima\"",
      "\"Tango\""};
  return pool;
}

const std::vector<std::string>& edge_roles() {
  static const std::vector<std::string> pool = {
      ":ARG0", ":ARG1", ":ARG2", ":time", ":mod",
      ":poss", ":manner", ":location"};
  return pool;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
  return pool[rng.bounded(pool.size())];
}

AmrGraph random_sentence(Rng& rng, const GenOptions& opts,
                         const std::string& id) {
  AmrGraph g;
  g.id = id;
  int n = opts.min_nodes +
          static_cast<int>(rng.bounded(
              static_cast<std::uint64_t>(opts.max_nodes - opts.min_nodes + 1)));

  std::vector<Var> vars;
  int name_counter = 0;
  for (int j = 0; j < n; ++j) {
    Var v = "x" + std::to_string(j);
    vars.push_back(v);
    bool named = rng.chance(opts.p_named_entity);
    if (named) {
      g.instances[v] = pick(rng, entity_types());
      Var nv = "n" + std::to_string(name_counter++);
      g.instances[nv] = "name";
      g.add_relation(v, ":name", nv);
      int ops = 1 + static_cast<int>(rng.bounded(2));
      for (int o = 0; o < ops; ++o)
        g.add_attribute(nv, ":op" + std::to_string(o + 1),
                        pick(rng, name_ops()));
      if (rng.chance(0.3)) g.add_attribute(v, ":wiki", pick(rng, name_ops()));
    } else if (rng.chance(opts.p_pronoun)) {
      g.instances[v] = pick(rng, pronoun_concepts());
    } else {
      g.instances[v] = pick(rng, content_concepts());
    }
    if (j > 0) {
      Var parent = vars[rng.bounded(static_cast<std::uint64_t>(j))];
      g.add_relation(parent, pick(rng, edge_roles()), v);
    }
    if (!named && rng.chance(opts.p_attribute)) {
      switch (rng.bounded(3)) {
        case 0:
          g.add_attribute(v, ":quant",
                          std::to_string(1 + rng.bounded(9)));
          break;
        case 1:
          g.add_attribute(v, ":polarity", "-");
          break;
        default:
          g.add_attribute(v, ":value", pick(rng, name_ops()));
          break;
      }
    }
  }
  if (n >= 3 && rng.chance(opts.p_reentrancy)) {
    Var a = vars[rng.bounded(vars.size())];
    Var b = vars[rng.bounded(vars.size())];
    if (a != b) {
      std::string role = pick(rng, edge_roles());
      bool dup = false;
      for (const Relation& r : g.relations)
        if (r.source == a && r.role == role && r.target == b) dup = true;
      if (!dup) g.add_relation(a, role, b);
    }
  }
  g.root = vars[0];
  return g;
}

}  // namespace

Document random_document(Rng& rng, const GenOptions& opts,
                         const std::string& doc_id) {
  int n_sent =
      opts.min_sentences +
      static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
          opts.max_sentences - opts.min_sentences + 1)));

  std::vector<AmrGraph> sentences;
  std::map<std::string, int> sent_pos;
  for (int i = 0; i < n_sent; ++i) {
    sentences.push_back(
        random_sentence(rng, opts, "s" + std::to_string(i + 1)));
    sent_pos[sentences.back().id] = i;
  }

  // Chain-eligible nodes: everything except name subgraph nodes.
  std::vector<NodeRef> eligible;
  for (const AmrGraph& s : sentences)
    for (const auto& [v, c] : s.instances)
      if (c != "name") eligible.push_back({s.id, v});

  DocumentAnnotation ann;
  ann.doc_id = doc_id;
  std::set<NodeRef> used;
  int n_chains = static_cast<int>(
      rng.bounded(static_cast<std::uint64_t>(opts.max_chains + 1)));
  for (int c = 0; c < n_chains; ++c) {
    int want = rng.chance(opts.p_singleton_chain)
                   ? 1
                   : opts.chain_min_members +
                         static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
                             opts.chain_max_members - opts.chain_min_members +
                             1)));
    IdentityChain chain;
    chain.id = "c" + std::to_string(c);
    for (int attempt = 0; attempt < 40 && static_cast<int>(
                                              chain.members.size()) < want;
         ++attempt) {
      const NodeRef& cand = eligible[rng.bounded(eligible.size())];
      if (used.count(cand)) continue;
      used.insert(cand);
      chain.members.push_back(cand);
    }
    if (chain.members.empty()) continue;
    std::sort(chain.members.begin(), chain.members.end(),
              [&](const NodeRef& a, const NodeRef& b) {
                return std::tie(sent_pos[a.sent_id], a.var) <
                       std::tie(sent_pos[b.sent_id], b.var);
              });
    ann.chains.push_back(std::move(chain));
  }

  auto random_target = [&](Rng& r) -> TargetRef {
    TargetRef t;
    if (!ann.chains.empty() && r.chance(0.6)) {
      t.chain_id = ann.chains[r.bounded(ann.chains.size())].id;
    } else {
      t.node = eligible[r.bounded(eligible.size())];
    }
    return t;
  };

  int n_implicit = static_cast<int>(
      rng.bounded(static_cast<std::uint64_t>(opts.max_implicit_roles + 1)));
  for (int k = 0; k < n_implicit; ++k) {
    ImplicitRole role;
    role.predicate = eligible[rng.bounded(eligible.size())];
    role.role = ":ARG" + std::to_string(3 + rng.bounded(4));
    role.target = random_target(rng);
    ann.implicit_roles.push_back(std::move(role));
  }

  int n_bridge = static_cast<int>(
      rng.bounded(static_cast<std::uint64_t>(opts.max_bridging + 1)));
  for (int k = 0; k < n_bridge; ++k) {
    BridgingRelation rel;
    rel.kind =
        rng.chance(0.5) ? BridgingKind::kPartWhole : BridgingKind::kSetMember;
    rel.parent = random_target(rng);
    rel.child = random_target(rng);
    if (rel.parent == rel.child) continue;
    ann.bridging.push_back(std::move(rel));
  }

  return make_document(std::move(sentences), std::move(ann));
}

namespace {

bool connected_without(const AmrGraph& g, size_t skip_index) {
  std::map<Var, std::vector<Var>> adj;
  for (size_t i = 0; i < g.relations.size(); ++i) {
    if (i == skip_index) continue;
    adj[g.relations[i].source].push_back(g.relations[i].target);
    adj[g.relations[i].target].push_back(g.relations[i].source);
  }
  std::set<Var> seen{g.root};
  std::deque<Var> queue{g.root};
  while (!queue.empty()) {
    Var v = queue.front();
    queue.pop_front();
    for (const Var& u : adj[v])
      if (seen.insert(u).second) queue.push_back(u);
  }
  return seen.size() == g.instances.size();
}

}  // namespace

DocGraph perturb_doc_graph(const DocGraph& gold, Rng& rng,
                           const PerturbOptions& opts) {
  DocGraph pred;
  pred.mode = gold.mode;
  pred.num_sentences = gold.num_sentences;

  auto rename = [](const Var& v) { return "p" + v; };

  AmrGraph& g = pred.graph;
  g.id = gold.graph.id;
  g.root = rename(gold.graph.root);
  for (const auto& [v, c] : gold.graph.instances) g.instances[rename(v)] = c;
  for (const Relation& r : gold.graph.relations)
    g.add_relation(rename(r.source), r.role, rename(r.target), r.inverted);
  for (const Attribute& a : gold.graph.attributes)
    g.add_attribute(rename(a.source), a.role, a.value);

  for (const Var& v : gold.sentence_roots)
    pred.sentence_roots.push_back(rename(v));
  for (const auto& [v, prov] : gold.provenance)
    pred.provenance[rename(v)] = prov;

  int fresh = 0;
  auto is_snt = [](const std::string& role) {
    return role.rfind(":snt", 0) == 0;
  };

  // Deletions keep the graph connected; corruptions use labels and values
  // that occur nowhere in the original pair.
  for (size_t i = 0; i < g.relations.size();) {
    const Relation& r = g.relations[i];
    if (!is_snt(r.role) && rng.chance(opts.p_delete_relation) &&
        connected_without(g, i)) {
      g.relations.erase(g.relations.begin() + static_cast<long>(i));
      continue;
    }
    ++i;
  }
  for (Relation& r : g.relations)
    if (!is_snt(r.role) && rng.chance(opts.p_relabel_relation))
      r.role = ":xx" + std::to_string(fresh++);
  for (auto& [v, c] : g.instances)
    if (v != g.root && rng.chance(opts.p_corrupt_concept))
      c = "corrupt-" + std::to_string(fresh++);
  for (size_t i = 0; i < g.attributes.size();) {
    if (rng.chance(opts.p_delete_attribute)) {
      g.attributes.erase(g.attributes.begin() + static_cast<long>(i));
      continue;
    }
    ++i;
  }

  return pred;
}

}  // namespace docamr
