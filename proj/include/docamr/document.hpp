#pragma once

#include <optional>
#include <string>
#include <vector>

#include "docamr/amr.hpp"

namespace docamr {

// A node in a specific sentence graph.
struct NodeRef {
  std::string sent_id;
  Var var;

  friend bool operator==(const NodeRef& a, const NodeRef& b) {
    return a.sent_id == b.sent_id && a.var == b.var;
  }
  friend bool operator<(const NodeRef& a, const NodeRef& b) {
    if (a.sent_id != b.sent_id) return a.sent_id < b.sent_id;
    return a.var < b.var;
  }
};

// Target of an implicit role or bridging endpoint: a chain or a single node.
struct TargetRef {
  std::string chain_id;          // non-empty when the target is a chain
  std::optional<NodeRef> node;   // set when the target is a single node

  bool is_chain() const { return !chain_id.empty(); }

  friend bool operator==(const TargetRef& a, const TargetRef& b) {
    return a.chain_id == b.chain_id && a.node == b.node;
  }
};

struct IdentityChain {
  std::string id;
  std::vector<NodeRef> members;  // document order
};

struct ImplicitRole {
  NodeRef predicate;
  std::string role;  // ":ARG4" etc.
  TargetRef target;
};

enum class BridgingKind { kPartWhole, kSetMember };

struct BridgingRelation {
  BridgingKind kind;
  TargetRef parent;  // the whole / the set
  TargetRef child;   // the part / the member
};

struct DocumentAnnotation {
  std::string doc_id;
  std::vector<IdentityChain> chains;
  std::vector<ImplicitRole> implicit_roles;
  std::vector<BridgingRelation> bridging;
};

struct Document {
  std::string doc_id;
  std::vector<AmrGraph> sentences;  // document order
  DocumentAnnotation annotation;

  int sentence_index(const std::string& sent_id) const;  // 0-based, -1 if absent
  const AmrGraph& sentence(const std::string& sent_id) const;
};

// Parses the annotation JSON schema:
//   { "doc_id": "...",
//     "chains": [ {"id":"c0","members":[{"sent":"s1","var":"p"},...]} ],
//     "implicit_roles": [ {"sent":"s2","var":"a","role":":ARG4",
//                          "target": {"chain":"c1"} | {"sent":..,"var":..}} ],
//     "bridging": [ {"kind":"part-whole"|"set-member",
//                    "parent":{...},"child":{...}} ] }
DocumentAnnotation parse_annotation_json(const std::string& text);
std::string serialize_annotation_json(const DocumentAnnotation& annotation);

// Assembles and validates a Document. Singleton chains are retained here;
// the builder resolves them. Throws IngestError listing offending references.
Document make_document(std::vector<AmrGraph> sentences,
                       DocumentAnnotation annotation);

Document load_document(const std::string& amr_path,
                       const std::string& annotation_path);

// Document with an empty annotation (no chains, roles, or bridging).
Document load_document_no_annotation(const std::string& amr_path);

void validate_document(const Document& doc);

}  // namespace docamr
