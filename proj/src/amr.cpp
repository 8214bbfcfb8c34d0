#include "docamr/amr.hpp"

#include <algorithm>
#include <deque>

#include "docamr/errors.hpp"

namespace docamr {

const std::string& AmrGraph::concept_of(const Var& v) const {
  auto it = instances.find(v);
  if (it == instances.end())
    throw GraphError("unknown variable '" + v + "'");
  return it->second;
}

int AmrGraph::next_seq() const {
  int seq = 0;
  for (const Attribute& a : attributes) seq = std::max(seq, a.seq + 1);
  for (const Relation& r : relations) seq = std::max(seq, r.seq + 1);
  return seq;
}

void AmrGraph::add_relation(const Var& src, const std::string& role,
                            const Var& tgt, bool inverted) {
  relations.push_back({src, role, tgt, inverted, next_seq()});
}

void AmrGraph::add_attribute(const Var& src, const std::string& role,
                             const std::string& value) {
  attributes.push_back({src, role, value, next_seq()});
}

std::vector<Var> AmrGraph::unreachable_from_root() const {
  std::map<Var, std::vector<Var>> adj;
  for (const Relation& r : relations) {
    adj[r.source].push_back(r.target);
    adj[r.target].push_back(r.source);
  }
  std::set<Var> seen;
  std::deque<Var> queue;
  if (instances.count(root)) {
    seen.insert(root);
    queue.push_back(root);
  }
  while (!queue.empty()) {
    Var v = queue.front();
    queue.pop_front();
    for (const Var& u : adj[v])
      if (seen.insert(u).second) queue.push_back(u);
  }
  std::vector<Var> missing;
  for (const auto& [v, c] : instances)
    if (!seen.count(v)) missing.push_back(v);
  return missing;
}

void AmrGraph::validate() const {
  if (!instances.count(root))
    throw GraphError("root variable '" + root + "' has no instance");
  for (const Relation& r : relations) {
    if (!instances.count(r.source))
      throw GraphError("relation source '" + r.source + "' has no instance");
    if (!instances.count(r.target))
      throw GraphError("relation target '" + r.target + "' has no instance");
  }
  for (const Attribute& a : attributes)
    if (!instances.count(a.source))
      throw GraphError("attribute source '" + a.source + "' has no instance");
  std::vector<Var> missing = unreachable_from_root();
  if (!missing.empty()) {
    std::string names;
    for (const Var& v : missing) names += (names.empty() ? "" : ", ") + v;
    throw GraphError("graph is disconnected; unreachable variables: " +
                     names);
  }
}

std::string strip_quotes(const std::string& value) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
    return value.substr(1, value.size() - 2);
  return value;
}

bool looks_like_variable(const std::string& token) {
  if (token.empty()) return false;
  // Machine-generated variable shapes: "b", "s2", "ce3", "ie12" and the
  // document-level "s<i>.<orig>" form. Word-like constants (imperative,
  // expressive) stay constants.
  size_t i = 0;
  auto lower = [](char c) { return c >= 'a' && c <= 'z'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!lower(token[0])) return false;
  if (token.size() >= 2 && digit(token[1]) == false && lower(token[1]) &&
      token.find('.') == std::string::npos) {
    // two letters: only variable-like when followed by digits (ce3, ie1)
    if (token.size() == 2) return false;
    for (size_t k = 2; k < token.size(); ++k)
      if (!digit(token[k])) return false;
    return true;
  }
  if (token.find('.') != std::string::npos) {
    // document variables: s<i>.<anything>
    if (token[0] != 's') return false;
    size_t dot = token.find('.');
    if (dot < 2 || dot + 1 >= token.size()) return false;
    for (size_t k = 1; k < dot; ++k)
      if (!digit(token[k])) return false;
    return true;
  }
  for (i = 1; i < token.size(); ++i)
    if (!digit(token[i])) return false;
  return true;
}

}  // namespace docamr
