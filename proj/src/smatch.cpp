#include "docamr/smatch.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "docamr/errors.hpp"

namespace docamr {

// ---------------------------------------------------------------------------
// TripleSet

int TripleSet::var_index(const Var& v) const {
  auto it = std::lower_bound(vars.begin(), vars.end(), v);
  if (it == vars.end() || *it != v) return -1;
  return static_cast<int>(it - vars.begin());
}

int TripleSet::attribute_count() const {
  int n = 0;
  for (const auto& a : attributes) n += static_cast<int>(a.size());
  return n;
}

int TripleSet::relation_index(int s, const std::string& role, int t) const {
  for (size_t i = 0; i < relations.size(); ++i)
    if (relations[i].source == s && relations[i].target == t &&
        relations[i].role == role)
      return static_cast<int>(i);
  return -1;
}

int TripleSet::coref_item_count() const {
  int n = 0;
  for (char c : instance_is_coref) n += c ? 1 : 0;
  for (char c : relation_is_coref) n += c ? 1 : 0;
  return n;
}

TripleSet extract_triples(const DocGraph& dg) {
  const AmrGraph& g = dg.graph;
  TripleSet ts;
  for (const auto& [v, c] : g.instances) ts.vars.push_back(v);
  std::sort(ts.vars.begin(), ts.vars.end());

  ts.concepts.resize(ts.vars.size());
  ts.attributes.resize(ts.vars.size());
  ts.provenance.resize(ts.vars.size());
  for (size_t i = 0; i < ts.vars.size(); ++i) {
    ts.concepts[i] = g.concept_of(ts.vars[i]);
    auto it = dg.provenance.find(ts.vars[i]);
    if (it != dg.provenance.end())
      ts.provenance[i].assign(it->second.begin(), it->second.end());
  }

  for (const Attribute& a : g.attributes) {
    int s = ts.var_index(a.source);
    ts.attributes[s].emplace_back(a.role, strip_quotes(a.value));
  }
  for (auto& attrs : ts.attributes) {
    std::sort(attrs.begin(), attrs.end());
    attrs.erase(std::unique(attrs.begin(), attrs.end()), attrs.end());
  }

  std::set<std::tuple<int, std::string, int>> seen;
  for (const Relation& r : g.relations) {
    int s = ts.var_index(r.source);
    int t = ts.var_index(r.target);
    if (seen.emplace(s, r.role, t).second)
      ts.relations.push_back({s, r.role, t});
  }
  std::sort(ts.relations.begin(), ts.relations.end(),
            [](const TripleSet::Rel& a, const TripleSet::Rel& b) {
              return std::tie(a.source, a.role, a.target) <
                     std::tie(b.source, b.role, b.target);
            });

  ts.doc_root = g.concept_of(g.root) == "document" ? ts.var_index(g.root) : -1;

  auto multi_sentence = [&](int v) {
    return v != ts.doc_root && ts.provenance[v].size() >= 2;
  };
  auto is_snt_role = [](const std::string& role) {
    if (role.rfind(":snt", 0) != 0 || role.size() <= 4) return false;
    return std::all_of(role.begin() + 4, role.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };

  ts.instance_is_coref.assign(ts.vars.size(), 0);
  for (size_t i = 0; i < ts.vars.size(); ++i)
    ts.instance_is_coref[i] = ts.concepts[i] == "coref-entity" ? 1 : 0;
  ts.relation_is_coref.assign(ts.relations.size(), 0);
  for (size_t i = 0; i < ts.relations.size(); ++i) {
    const TripleSet::Rel& r = ts.relations[i];
    if (r.source == ts.doc_root && is_snt_role(r.role)) continue;
    ts.relation_is_coref[i] = multi_sentence(r.target) ? 1 : 0;
  }
  return ts;
}

// ---------------------------------------------------------------------------
// Result arithmetic

namespace {

double safe_div(double a, double b) { return b == 0.0 ? 0.0 : a / b; }

double harmonic(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace

double SmatchResult::precision() const {
  return safe_div(static_cast<double>(matched),
                  static_cast<double>(source_triples));
}
double SmatchResult::recall() const {
  return safe_div(static_cast<double>(matched),
                  static_cast<double>(target_triples));
}
double SmatchResult::f1() const { return harmonic(precision(), recall()); }
double SmatchResult::coref_precision() const {
  return safe_div(static_cast<double>(coref_correct),
                  static_cast<double>(coref_source));
}
double SmatchResult::coref_recall() const {
  return safe_div(static_cast<double>(coref_correct),
                  static_cast<double>(coref_target));
}
double SmatchResult::coref_f1() const {
  return harmonic(coref_precision(), coref_recall());
}

// ---------------------------------------------------------------------------
// Candidate pool

namespace {

bool provenance_compatible(const TripleSet& src, const TripleSet& tgt, int v,
                           int u) {
  if (src.provenance[v].size() != 1) return true;
  int sent = src.provenance[v][0];
  const auto& p = tgt.provenance[u];
  return std::binary_search(p.begin(), p.end(), sent);
}

}  // namespace

std::vector<std::vector<int>> candidate_pool(const TripleSet& source,
                                             const TripleSet& target,
                                             bool constrained) {
  if (constrained) {
    auto max_sentence = [](const TripleSet& ts) {
      int out = 0;
      for (const auto& p : ts.provenance)
        if (!p.empty()) out = std::max(out, p.back());
      return out;
    };
    int a = max_sentence(source), b = max_sentence(target);
    if (a != b)
      throw UsageError("constrained pool needs equal sentence counts (" +
                       std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  std::vector<std::set<int>> pool(source.vars.size());

  std::unordered_map<std::string, std::vector<int>> tgt_by_concept;
  for (size_t u = 0; u < target.vars.size(); ++u)
    tgt_by_concept[target.concepts[u]].push_back(static_cast<int>(u));
  for (size_t v = 0; v < source.vars.size(); ++v) {
    auto it = tgt_by_concept.find(source.concepts[v]);
    if (it == tgt_by_concept.end()) continue;
    for (int u : it->second) pool[v].insert(u);
  }

  std::map<std::pair<std::string, std::string>, std::vector<int>> tgt_by_attr;
  for (size_t u = 0; u < target.vars.size(); ++u)
    for (const auto& a : target.attributes[u])
      tgt_by_attr[a].push_back(static_cast<int>(u));
  for (size_t v = 0; v < source.vars.size(); ++v)
    for (const auto& a : source.attributes[v]) {
      auto it = tgt_by_attr.find(a);
      if (it == tgt_by_attr.end()) continue;
      for (int u : it->second) pool[v].insert(u);
    }

  std::unordered_map<std::string, std::vector<int>> tgt_rel_by_role;
  for (size_t j = 0; j < target.relations.size(); ++j)
    tgt_rel_by_role[target.relations[j].role].push_back(static_cast<int>(j));
  for (const TripleSet::Rel& r : source.relations) {
    auto it = tgt_rel_by_role.find(r.role);
    if (it == tgt_rel_by_role.end()) continue;
    for (int j : it->second) {
      pool[r.source].insert(target.relations[j].source);
      pool[r.target].insert(target.relations[j].target);
    }
  }

  std::vector<std::vector<int>> out(source.vars.size());
  for (size_t v = 0; v < source.vars.size(); ++v)
    for (int u : pool[v]) {
      if (constrained && !provenance_compatible(source, target,
                                                static_cast<int>(v), u))
        continue;
      out[v].push_back(u);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Matching engine

namespace {

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t bounded(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
};

class Engine {
 public:
  Engine(const TripleSet& src, const TripleSet& tgt, bool constrained)
      : src_(src), tgt_(tgt) {
    pool_ = candidate_pool(src, tgt, constrained);
    intern_roles();
    index_target();
    build_unary();
    build_adjacency();
  }

  const std::vector<std::vector<int>>& pool() const { return pool_; }
  int n_src() const { return static_cast<int>(src_.vars.size()); }
  int n_tgt() const { return static_cast<int>(tgt_.vars.size()); }

  int unary(int v, int u) const {
    const auto& p = pool_[v];
    auto it = std::lower_bound(p.begin(), p.end(), u);
    if (it == p.end() || *it != u) return 0;
    return unary_[v][it - p.begin()];
  }

  bool in_pool(int v, int u) const {
    const auto& p = pool_[v];
    return std::binary_search(p.begin(), p.end(), u);
  }

  bool tgt_has_rel(int s, int role, int t) const {
    return tgt_rels_.count(key(s, role, t)) != 0;
  }

  long long full_matched(const std::vector<int>& m) const {
    long long out = 0;
    for (int v = 0; v < n_src(); ++v)
      if (m[v] >= 0) out += unary(v, m[v]);
    for (const auto& r : src_rel_ids_) {
      int ms = m[r.s], mt = m[r.t];
      if (ms >= 0 && mt >= 0 && tgt_has_rel(ms, r.role, mt)) ++out;
    }
    return out;
  }

  // Matched triples whose source variables lie in {v1} or {v1, v2}; used
  // for move deltas.
  long long local_matched(const std::vector<int>& m, int v1,
                          int v2 = -1) const {
    long long out = 0;
    if (m[v1] >= 0) out += unary(v1, m[v1]);
    if (v2 >= 0 && m[v2] >= 0) out += unary(v2, m[v2]);
    for (int i : adj_[v1]) out += rel_match(m, i);
    if (v2 >= 0)
      for (int i : adj_[v2]) {
        const auto& r = src_rel_ids_[i];
        if (r.s == v1 || r.t == v1) continue;  // counted above
        out += rel_match(m, i);
      }
    return out;
  }

  // Hill climbing from the given initial mapping. Returns matched count.
  long long climb(std::vector<int>& m) const {
    std::vector<int> inv(n_tgt(), -1);
    for (int v = 0; v < n_src(); ++v)
      if (m[v] >= 0) inv[m[v]] = v;

    long long matched = full_matched(m);
    while (true) {
      long long best_gain = 0;
      int best_kind = -1, best_v = -1, best_x = -1;
      auto consider = [&](long long gain, int kind, int v, int x) {
        if (gain <= 0 || gain < best_gain) return;
        if (gain == best_gain && best_kind >= 0 &&
            std::tie(kind, v, x) >= std::tie(best_kind, best_v, best_x))
          return;
        best_gain = gain;
        best_kind = kind;
        best_v = v;
        best_x = x;
      };

      for (int v = 0; v < n_src(); ++v) {
        long long before = local_matched(m, v);
        int old = m[v];
        auto try_candidate = [&](int u) {
          if (u == old) return;
          if (u >= 0 && inv[u] >= 0) return;
          m[v] = u;
          long long gain = local_matched(m, v) - before;
          m[v] = old;
          consider(gain, 0, v, u + 1);
        };
        for (int u : pool_[v]) try_candidate(u);
        try_candidate(-1);
      }

      // Pairwise swaps between pool-compatible variables; one side may end
      // up unmapped when the other was unmapped.
      for (int v1 = 0; v1 < n_src(); ++v1) {
        for (int u2 : pool_[v1]) {
          int v2 = inv[u2];
          if (v2 < 0 || v2 == v1) continue;
          int u1 = m[v1];
          if (u1 >= 0) {
            if (v1 > v2) continue;  // symmetric, evaluate once
            if (!in_pool(v2, u1)) continue;
          }
          long long before = local_matched(m, v1, v2);
          m[v1] = u2;
          m[v2] = u1;
          long long gain = local_matched(m, v1, v2) - before;
          m[v1] = u1;
          m[v2] = u2;
          consider(gain, 1, v1, v2);
        }
      }

      if (best_kind < 0 || best_gain <= 0) break;
      if (best_kind == 0) {
        int u = best_x - 1;
        if (m[best_v] >= 0) inv[m[best_v]] = -1;
        m[best_v] = u;
        if (u >= 0) inv[u] = best_v;
      } else {
        int v1 = best_v, v2 = best_x;
        int u1 = m[v1], u2 = m[v2];
        m[v1] = u2;
        m[v2] = u1;
        if (u1 >= 0) inv[u1] = v2;
        if (u2 >= 0) inv[u2] = v1;
      }
      matched += best_gain;
    }
    return matched;
  }

  std::vector<int> smart_init() const {
    struct Pair {
      int overlap;
      int v;
      int u;
    };
    std::vector<Pair> pairs;
    for (int v = 0; v < n_src(); ++v)
      for (int u : pool_[v]) {
        if (src_.concepts[v] != tgt_.concepts[u]) continue;
        pairs.push_back({role_overlap(v, u), v, u});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.overlap != b.overlap) return a.overlap > b.overlap;
      return std::tie(a.v, a.u) < std::tie(b.v, b.u);
    });
    std::vector<int> m(n_src(), -1);
    std::vector<int> inv(n_tgt(), -1);
    for (const Pair& p : pairs)
      if (m[p.v] < 0 && inv[p.u] < 0) {
        m[p.v] = p.u;
        inv[p.u] = p.v;
      }
    return m;
  }

  std::vector<int> random_init(std::uint64_t seed) const {
    SplitMix64 rng{seed};
    std::vector<int> order(n_src());
    for (int i = 0; i < n_src(); ++i) order[i] = i;
    for (int i = n_src() - 1; i > 0; --i)
      std::swap(order[i],
                order[rng.bounded(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<int> m(n_src(), -1);
    std::vector<char> used(n_tgt(), 0);
    std::vector<int> avail;
    for (int v : order) {
      avail.clear();
      for (int u : pool_[v])
        if (!used[u]) avail.push_back(u);
      std::uint64_t pick = rng.bounded(avail.size() + 1);
      if (pick < avail.size()) {
        m[v] = avail[pick];
        used[avail[pick]] = 1;
      }
    }
    return m;
  }

  // Exhaustive optimum over pool-respecting injective mappings.
  long long exact(std::vector<int>& best_mapping) const {
    int n = n_src();
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::vector<int> weight(n, 0);
    for (int v = 0; v < n; ++v) {
      int mu = 0;
      for (int u : pool_[v]) mu = std::max(mu, unary(v, u));
      weight[v] = mu + static_cast<int>(adj_[v].size());
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (weight[a] != weight[b]) return weight[a] > weight[b];
      return a < b;
    });

    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[order[k]] = k;
    // cap[v]: best possible contribution when v is assigned, counting each
    // relation at its later-ordered endpoint.
    std::vector<long long> cap(n, 0);
    for (int v = 0; v < n; ++v) {
      int mu = 0;
      for (int u : pool_[v]) mu = std::max(mu, unary(v, u));
      cap[v] = mu;
    }
    for (const auto& r : src_rel_ids_) {
      int later = pos[r.s] >= pos[r.t] ? r.s : r.t;
      cap[later] += 1;
    }
    std::vector<long long> suffix(n + 1, 0);
    for (int k = n - 1; k >= 0; --k) suffix[k] = suffix[k + 1] + cap[order[k]];

    std::vector<int> m(n, -1);
    std::vector<char> used(n_tgt(), 0);
    long long best = -1;
    std::vector<int> best_m(n, -1);

    auto gain_of = [&](int v, int u) {
      long long g = unary(v, u);
      for (int i : adj_[v]) {
        const auto& r = src_rel_ids_[i];
        if (r.s == v && r.t == v) {
          if (tgt_has_rel(u, r.role, u)) ++g;
          continue;
        }
        int other = r.s == v ? r.t : r.s;
        if (m[other] < 0) continue;
        if (pos[other] > pos[v]) continue;  // counted when `other` assigned
        int ms = r.s == v ? u : m[r.s];
        int mt = r.t == v ? u : m[r.t];
        if (tgt_has_rel(ms, r.role, mt)) ++g;
      }
      return g;
    };

    auto dfs = [&](auto&& self, int k, long long acc) -> void {
      if (acc + suffix[k] <= best) return;
      if (k == n) {
        if (acc > best) {
          best = acc;
          best_m = m;
        }
        return;
      }
      int v = order[k];
      for (int u : pool_[v]) {
        if (used[u]) continue;
        long long g = gain_of(v, u);
        m[v] = u;
        used[u] = 1;
        self(self, k + 1, acc + g);
        used[u] = 0;
        m[v] = -1;
      }
      self(self, k + 1, acc);  // leave v unmapped
    };
    dfs(dfs, 0, 0);
    best_mapping = best_m;
    return best < 0 ? 0 : best;
  }

 private:
  struct RelIds {
    int s;
    int role;
    int t;
  };

  static std::uint64_t key(int s, int role, int t) {
    return (static_cast<std::uint64_t>(s) << 40) |
           (static_cast<std::uint64_t>(role) << 20) |
           static_cast<std::uint64_t>(t);
  }

  void intern_roles() {
    auto intern = [&](const std::string& role) {
      auto [it, fresh] = role_ids_.emplace(role, role_ids_.size());
      return it->second;
    };
    src_rel_ids_.reserve(src_.relations.size());
    for (const auto& r : src_.relations)
      src_rel_ids_.push_back({r.source, intern(r.role), r.target});
    tgt_rel_ids_.reserve(tgt_.relations.size());
    for (const auto& r : tgt_.relations)
      tgt_rel_ids_.push_back({r.source, intern(r.role), r.target});
  }

  void index_target() {
    for (size_t j = 0; j < tgt_rel_ids_.size(); ++j) {
      const RelIds& r = tgt_rel_ids_[j];
      tgt_rels_.emplace(key(r.s, r.role, r.t), static_cast<int>(j));
    }
  }

  void build_unary() {
    unary_.resize(pool_.size());
    for (size_t v = 0; v < pool_.size(); ++v) {
      unary_[v].resize(pool_[v].size());
      for (size_t k = 0; k < pool_[v].size(); ++k) {
        int u = pool_[v][k];
        int score =
            src_.concepts[v] == tgt_.concepts[u] ? 1 : 0;
        const auto& a = src_.attributes[v];
        const auto& b = tgt_.attributes[u];
        size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
          if (a[i] < b[j])
            ++i;
          else if (b[j] < a[i])
            ++j;
          else {
            ++score;
            ++i;
            ++j;
          }
        }
        unary_[v][k] = score;
      }
    }
  }

  void build_adjacency() {
    adj_.resize(src_.vars.size());
    role_sigs_src_.resize(src_.vars.size());
    role_sigs_tgt_.resize(tgt_.vars.size());
    for (size_t i = 0; i < src_rel_ids_.size(); ++i) {
      const RelIds& r = src_rel_ids_[i];
      adj_[r.s].push_back(static_cast<int>(i));
      if (r.t != r.s) adj_[r.t].push_back(static_cast<int>(i));
      role_sigs_src_[r.s].push_back(r.role * 2);
      role_sigs_src_[r.t].push_back(r.role * 2 + 1);
    }
    for (const RelIds& r : tgt_rel_ids_) {
      role_sigs_tgt_[r.s].push_back(r.role * 2);
      role_sigs_tgt_[r.t].push_back(r.role * 2 + 1);
    }
    for (auto& s : role_sigs_src_) std::sort(s.begin(), s.end());
    for (auto& s : role_sigs_tgt_) std::sort(s.begin(), s.end());
  }

  long long rel_match(const std::vector<int>& m, int i) const {
    const RelIds& r = src_rel_ids_[i];
    int ms = m[r.s], mt = m[r.t];
    if (ms < 0 || mt < 0) return 0;
    return tgt_rels_.count(key(ms, r.role, mt)) ? 1 : 0;
  }

  int role_overlap(int v, int u) const {
    const auto& a = role_sigs_src_[v];
    const auto& b = role_sigs_tgt_[u];
    size_t i = 0, j = 0;
    int out = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j])
        ++i;
      else if (b[j] < a[i])
        ++j;
      else {
        ++out;
        ++i;
        ++j;
      }
    }
    return out;
  }

  const TripleSet& src_;
  const TripleSet& tgt_;
  std::vector<std::vector<int>> pool_;
  std::vector<std::vector<int>> unary_;
  std::unordered_map<std::string, int> role_ids_;
  std::vector<RelIds> src_rel_ids_, tgt_rel_ids_;
  std::unordered_map<std::uint64_t, int> tgt_rels_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::vector<int>> role_sigs_src_, role_sigs_tgt_;
};

SmatchResult make_result(const TripleSet& src, const TripleSet& tgt,
                         const NodeMapping& mapping, long long matched,
                         int restarts) {
  SmatchResult res;
  res.matched = matched;
  res.source_triples = src.total_triples();
  res.target_triples = tgt.total_triples();
  SubScore sub = coref_subscore(src, tgt, mapping);
  res.coref_correct = sub.correct;
  res.coref_source = sub.source_items;
  res.coref_target = sub.target_items;
  res.restarts_used = restarts;
  return res;
}

}  // namespace

std::pair<NodeMapping, SmatchResult> hill_climb(const TripleSet& source,
                                                const TripleSet& target,
                                                const SearchConfig& cfg) {
  if (cfg.restarts < 1) throw UsageError("restarts must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  Engine engine(source, target, cfg.constrained);

  long long best = -1;
  std::vector<int> best_m;
  for (int r = 0; r < cfg.restarts; ++r) {
    std::vector<int> m =
        r == 0 ? engine.smart_init()
               : engine.random_init(cfg.seed * 0x9E3779B97F4A7C15ULL +
                                    static_cast<std::uint64_t>(r) *
                                        0xD1B54A32D192ED03ULL);
    long long matched = engine.climb(m);
    if (matched > best) {
      best = matched;
      best_m = std::move(m);
    }
  }
  NodeMapping mapping{std::move(best_m)};
  SmatchResult res =
      make_result(source, target, mapping, best, cfg.restarts);
  res.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return {std::move(mapping), res};
}

std::pair<NodeMapping, SmatchResult> exact_match(const TripleSet& source,
                                                 const TripleSet& target,
                                                 const SearchConfig& cfg) {
  size_t smaller = std::min(source.vars.size(), target.vars.size());
  if (static_cast<int>(smaller) > cfg.max_exact_nodes)
    throw UsageError("exact_match limited to graphs with at most " +
                     std::to_string(cfg.max_exact_nodes) +
                     " nodes on one side");
  auto t0 = std::chrono::steady_clock::now();

  if (source.vars.size() > static_cast<size_t>(cfg.max_exact_nodes)) {
    // Enumerate over the smaller side and invert.
    auto [rev_mapping, rev] = exact_match(target, source, cfg);
    NodeMapping mapping;
    mapping.to_target.assign(source.vars.size(), -1);
    for (size_t u = 0; u < rev_mapping.to_target.size(); ++u)
      if (rev_mapping.to_target[u] >= 0)
        mapping.to_target[rev_mapping.to_target[u]] = static_cast<int>(u);
    SmatchResult res =
        make_result(source, target, mapping, rev.matched, 0);
    res.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return {std::move(mapping), res};
  }

  Engine engine(source, target, cfg.constrained);
  std::vector<int> m;
  long long best = engine.exact(m);
  NodeMapping mapping{std::move(m)};
  SmatchResult res = make_result(source, target, mapping, best, 0);
  res.elapsed_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return {std::move(mapping), res};
}

long long matched_triples(const TripleSet& source, const TripleSet& target,
                          const NodeMapping& mapping) {
  const std::vector<int>& m = mapping.to_target;
  long long out = 0;
  for (size_t v = 0; v < source.vars.size(); ++v) {
    int u = m[v];
    if (u < 0) continue;
    if (source.concepts[v] == target.concepts[u]) ++out;
    const auto& a = source.attributes[v];
    const auto& b = target.attributes[u];
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] < b[j])
        ++i;
      else if (b[j] < a[i])
        ++j;
      else {
        ++out;
        ++i;
        ++j;
      }
    }
  }
  for (const TripleSet::Rel& r : source.relations) {
    int ms = m[r.source], mt = m[r.target];
    if (ms < 0 || mt < 0) continue;
    if (target.relation_index(ms, r.role, mt) >= 0) ++out;
  }
  return out;
}

SubScore coref_subscore(const TripleSet& source, const TripleSet& target,
                        const NodeMapping& mapping) {
  SubScore sub;
  sub.source_items = source.coref_item_count();
  sub.target_items = target.coref_item_count();
  const std::vector<int>& m = mapping.to_target;
  for (size_t v = 0; v < source.vars.size(); ++v) {
    int u = m.empty() ? -1 : m[v];
    if (u < 0) continue;
    if (source.concepts[v] != target.concepts[u]) continue;
    if (source.instance_is_coref[v] && target.instance_is_coref[u])
      ++sub.correct;
  }
  for (size_t i = 0; i < source.relations.size(); ++i) {
    if (!source.relation_is_coref[i]) continue;
    const TripleSet::Rel& r = source.relations[i];
    int ms = m.empty() ? -1 : m[r.source];
    int mt = m.empty() ? -1 : m[r.target];
    if (ms < 0 || mt < 0) continue;
    int j = target.relation_index(ms, r.role, mt);
    if (j >= 0 && target.relation_is_coref[j]) ++sub.correct;
  }
  return sub;
}

CorpusResult score_corpus(const std::vector<DocGraph>& gold,
                          const std::vector<DocGraph>& pred,
                          const SearchConfig& cfg, int threads) {
  if (gold.size() != pred.size())
    throw UsageError("corpus size mismatch: " + std::to_string(gold.size()) +
                     " gold vs " + std::to_string(pred.size()) +
                     " predicted documents");
  for (size_t i = 0; i < gold.size(); ++i)
    if (gold[i].graph.id != pred[i].graph.id)
      throw UsageError("document id mismatch at position " +
                       std::to_string(i) + ": '" + gold[i].graph.id +
                       "' vs '" + pred[i].graph.id + "'");

  CorpusResult out;
  out.per_doc.resize(gold.size());

  int n_threads = threads;
  if (n_threads <= 0)
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min(n_threads, static_cast<int>(std::max<size_t>(
                                      gold.size(), 1)));

  std::atomic<size_t> cursor{0};
  std::vector<std::string> errors(n_threads);
  auto worker = [&](int slot) {
    try {
      while (true) {
        size_t i = cursor.fetch_add(1);
        if (i >= gold.size()) break;
        TripleSet gold_ts = extract_triples(gold[i]);
        TripleSet pred_ts = extract_triples(pred[i]);
        if (cfg.constrained &&
            gold[i].num_sentences != pred[i].num_sentences)
          throw UsageError("constrained mode requires equal sentence counts "
                           "for document '" +
                           gold[i].graph.id + "'");
        auto [mapping, res] = hill_climb(pred_ts, gold_ts, cfg);
        out.per_doc[i] = DocScore{gold[i].graph.id, res};
      }
    } catch (const std::exception& e) {
      errors[slot] = e.what();
    }
  };

  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }
  for (const std::string& e : errors)
    if (!e.empty()) throw UsageError(e);

  SmatchResult& total = out.total;
  for (const DocScore& doc : out.per_doc) {
    total.matched += doc.result.matched;
    total.source_triples += doc.result.source_triples;
    total.target_triples += doc.result.target_triples;
    total.coref_correct += doc.result.coref_correct;
    total.coref_source += doc.result.coref_source;
    total.coref_target += doc.result.coref_target;
    total.elapsed_ms += doc.result.elapsed_ms;
  }
  total.restarts_used = cfg.restarts;
  return out;
}

}  // namespace docamr
