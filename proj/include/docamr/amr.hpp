#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace docamr {

using Var = std::string;

// A single attribute triple: (source, role, constant). Constants keep their
// surface form, including surrounding quotes when the input was quoted.
struct Attribute {
  Var source;
  std::string role;
  std::string value;
  int seq = 0;  // original occurrence order, used for deterministic printing

  friend bool operator==(const Attribute& a, const Attribute& b) {
    return a.source == b.source && a.role == b.role && a.value == b.value;
  }
};

// A relation triple between two variables. Inverse roles (":ARG0-of") are
// normalized at parse time to the forward role with swapped endpoints;
// `inverted` remembers the original serialization side so printing can
// restore it.
struct Relation {
  Var source;
  std::string role;
  Var target;
  bool inverted = false;
  int seq = 0;

  friend bool operator==(const Relation& a, const Relation& b) {
    return a.source == b.source && a.role == b.role && a.target == b.target;
  }
};

// One AMR graph. Used both for sentence graphs and for assembled
// document-level graphs (whose root concept is "document").
struct AmrGraph {
  std::string id;
  Var root;
  std::map<Var, std::string> instances;  // exactly one concept per variable
  std::vector<Attribute> attributes;
  std::vector<Relation> relations;
  std::map<Var, std::set<int>> alignments;  // variable -> 0-based token indices
  std::vector<std::string> tokens;          // from "# ::tok", may be empty
  std::vector<std::string> metadata;        // raw "# ::..." lines, verbatim

  bool has_var(const Var& v) const { return instances.count(v) != 0; }

  const std::string& concept_of(const Var& v) const;

  int next_seq() const;

  void add_relation(const Var& src, const std::string& role, const Var& tgt,
                    bool inverted = false);
  void add_attribute(const Var& src, const std::string& role,
                     const std::string& value);

  // Checks the AmrGraph invariants: root declared, every endpoint declared,
  // connectivity under undirected edges. Throws GraphError.
  void validate() const;

  // Variables unreachable from the root treating relations as undirected.
  std::vector<Var> unreachable_from_root() const;
};

// Strips one layer of surrounding double quotes, if present. Attribute
// values compare equal modulo quoting.
std::string strip_quotes(const std::string& value);

// True when an undeclared bare token in target position should be treated
// as a dangling variable reference rather than a constant.
bool looks_like_variable(const std::string& token);

}  // namespace docamr
