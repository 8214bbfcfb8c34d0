#include "docamr/document.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

#include "docamr/errors.hpp"
#include "docamr/penman.hpp"

namespace docamr {

using nlohmann::json;

int Document::sentence_index(const std::string& sent_id) const {
  for (size_t i = 0; i < sentences.size(); ++i)
    if (sentences[i].id == sent_id) return static_cast<int>(i);
  return -1;
}

const AmrGraph& Document::sentence(const std::string& sent_id) const {
  int i = sentence_index(sent_id);
  if (i < 0) throw IngestError("unknown sentence id '" + sent_id + "'");
  return sentences[i];
}

namespace {

NodeRef parse_node_ref(const json& j, const char* where) {
  if (!j.is_object() || !j.contains("sent") || !j.contains("var"))
    throw IngestError(std::string("malformed node reference in ") + where);
  return NodeRef{j.at("sent").get<std::string>(),
                 j.at("var").get<std::string>()};
}

TargetRef parse_target(const json& j, const char* where) {
  TargetRef t;
  if (j.is_object() && j.contains("chain")) {
    t.chain_id = j.at("chain").get<std::string>();
    return t;
  }
  t.node = parse_node_ref(j, where);
  return t;
}

json target_to_json(const TargetRef& t) {
  if (t.is_chain()) return json{{"chain", t.chain_id}};
  return json{{"sent", t.node->sent_id}, {"var", t.node->var}};
}

const std::set<std::string>& core_non_arg_roles() {
  static const std::set<std::string> roles = {
      ":accompanier", ":beneficiary", ":cause",      ":destination",
      ":duration",    ":extent",      ":instrument", ":location",
      ":manner",      ":medium",      ":mod",        ":domain",
      ":part",        ":path",        ":poss",       ":purpose",
      ":source",      ":time",        ":topic"};
  return roles;
}

bool valid_implicit_role(const std::string& role) {
  static const std::regex arg_pattern("^:ARG[0-9]+$");
  if (std::regex_match(role, arg_pattern)) return true;
  return core_non_arg_roles().count(role) != 0;
}

}  // namespace

DocumentAnnotation parse_annotation_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IngestError(std::string("annotation JSON parse error: ") +
                      e.what());
  }
  DocumentAnnotation ann;
  if (j.contains("doc_id")) ann.doc_id = j.at("doc_id").get<std::string>();
  for (const json& cj : j.value("chains", json::array())) {
    IdentityChain chain;
    chain.id = cj.at("id").get<std::string>();
    for (const json& mj : cj.at("members"))
      chain.members.push_back(parse_node_ref(mj, "chain members"));
    ann.chains.push_back(std::move(chain));
  }
  for (const json& rj : j.value("implicit_roles", json::array())) {
    ImplicitRole role;
    role.predicate = parse_node_ref(rj, "implicit role predicate");
    role.role = rj.at("role").get<std::string>();
    role.target = parse_target(rj.at("target"), "implicit role target");
    ann.implicit_roles.push_back(std::move(role));
  }
  for (const json& bj : j.value("bridging", json::array())) {
    BridgingRelation rel;
    std::string kind = bj.at("kind").get<std::string>();
    if (kind == "part-whole")
      rel.kind = BridgingKind::kPartWhole;
    else if (kind == "set-member")
      rel.kind = BridgingKind::kSetMember;
    else
      throw IngestError("unknown bridging kind '" + kind + "'");
    rel.parent = parse_target(bj.at("parent"), "bridging parent");
    rel.child = parse_target(bj.at("child"), "bridging child");
    ann.bridging.push_back(std::move(rel));
  }
  return ann;
}

std::string serialize_annotation_json(const DocumentAnnotation& annotation) {
  json j;
  j["doc_id"] = annotation.doc_id;
  j["chains"] = json::array();
  for (const IdentityChain& chain : annotation.chains) {
    json members = json::array();
    for (const NodeRef& m : chain.members)
      members.push_back(json{{"sent", m.sent_id}, {"var", m.var}});
    j["chains"].push_back(json{{"id", chain.id}, {"members", members}});
  }
  j["implicit_roles"] = json::array();
  for (const ImplicitRole& role : annotation.implicit_roles) {
    j["implicit_roles"].push_back(
        json{{"sent", role.predicate.sent_id},
             {"var", role.predicate.var},
             {"role", role.role},
             {"target", target_to_json(role.target)}});
  }
  j["bridging"] = json::array();
  for (const BridgingRelation& rel : annotation.bridging) {
    j["bridging"].push_back(json{
        {"kind",
         rel.kind == BridgingKind::kPartWhole ? "part-whole" : "set-member"},
        {"parent", target_to_json(rel.parent)},
        {"child", target_to_json(rel.child)}});
  }
  return j.dump(2) + "\n";
}

void validate_document(const Document& doc) {
  std::vector<std::string> problems;
  std::set<std::string> sent_ids;
  for (const AmrGraph& g : doc.sentences) {
    if (g.id.empty())
      problems.push_back("sentence without '# ::id' metadata");
    else if (!sent_ids.insert(g.id).second)
      problems.push_back("duplicate sentence id '" + g.id + "'");
  }

  auto check_ref = [&](const NodeRef& ref, const std::string& where) {
    int i = doc.sentence_index(ref.sent_id);
    if (i < 0) {
      problems.push_back("unresolved reference (" + ref.sent_id + ", " +
                         ref.var + ") in " + where + ": unknown sentence");
      return;
    }
    if (!doc.sentences[i].has_var(ref.var))
      problems.push_back("unresolved reference (" + ref.sent_id + ", " +
                         ref.var + ") in " + where +
                         ": variable not in sentence");
  };

  std::set<std::string> chain_ids;
  std::set<NodeRef> seen_members;
  for (const IdentityChain& chain : doc.annotation.chains) {
    if (!chain_ids.insert(chain.id).second)
      problems.push_back("duplicate chain id '" + chain.id + "'");
    if (chain.members.empty())
      problems.push_back("chain '" + chain.id + "' has no members");
    for (const NodeRef& m : chain.members) {
      check_ref(m, "chain '" + chain.id + "'");
      if (!seen_members.insert(m).second)
        problems.push_back("duplicate chain membership: (" + m.sent_id +
                           ", " + m.var + ")");
    }
  }

  auto check_target = [&](const TargetRef& t, const std::string& where) {
    if (t.is_chain()) {
      if (!chain_ids.count(t.chain_id))
        problems.push_back("unknown chain '" + t.chain_id + "' in " + where);
    } else if (t.node) {
      check_ref(*t.node, where);
    } else {
      problems.push_back("empty target in " + where);
    }
  };

  for (const ImplicitRole& role : doc.annotation.implicit_roles) {
    check_ref(role.predicate, "implicit role predicate");
    if (!valid_implicit_role(role.role))
      problems.push_back("invalid implicit role label '" + role.role + "'");
    check_target(role.target, "implicit role target");
  }
  for (const BridgingRelation& rel : doc.annotation.bridging) {
    check_target(rel.parent, "bridging parent");
    check_target(rel.child, "bridging child");
    if (rel.parent == rel.child)
      problems.push_back("bridging relation with identical endpoints");
  }

  if (!problems.empty()) {
    std::string msg = "document validation failed:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw IngestError(msg);
  }
}

Document make_document(std::vector<AmrGraph> sentences,
                       DocumentAnnotation annotation) {
  Document doc;
  doc.doc_id = annotation.doc_id;
  doc.sentences = std::move(sentences);
  doc.annotation = std::move(annotation);
  if (doc.doc_id.empty()) doc.doc_id = "doc";
  validate_document(doc);
  return doc;
}

Document load_document(const std::string& amr_path,
                       const std::string& annotation_path) {
  std::ifstream in(annotation_path);
  if (!in) throw UsageError("cannot open file: " + annotation_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return make_document(parse_penman_file(amr_path),
                       parse_annotation_json(ss.str()));
}

Document load_document_no_annotation(const std::string& amr_path) {
  return make_document(parse_penman_file(amr_path), DocumentAnnotation{});
}

}  // namespace docamr
