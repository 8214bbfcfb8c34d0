#include "docamr/injector.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"

#include "docamr/errors.hpp"
#include "docamr/penman.hpp"

namespace docamr {

using nlohmann::json;

std::vector<NodeSpan> node_spans(const AmrGraph& graph) {
  if (graph.tokens.empty())
    throw UsageError("node_spans requires '# ::tok' metadata on sentence '" +
                     graph.id + "'");

  SpanningTree tree = print_spanning_tree(graph);

  std::map<Var, bool> has_attr;
  for (const Attribute& a : graph.attributes) has_attr[a.source] = true;

  struct Info {
    int height = 0;
    int min_tok = -1;
    int max_tok = -1;
  };
  std::map<Var, Info> info;

  auto visit = [&](const Var& v, auto&& self) -> Info {
    Info out;
    if (has_attr.count(v)) out.height = 1;
    auto it = graph.alignments.find(v);
    if (it != graph.alignments.end() && !it->second.empty()) {
      out.min_tok = *it->second.begin();
      out.max_tok = *it->second.rbegin();
    }
    auto ct = tree.tree_children.find(v);
    if (ct != tree.tree_children.end()) {
      for (int i : ct->second) {
        const Relation& r = graph.relations[i];
        Var child = r.source == v ? r.target : r.source;
        Info c = self(child, self);
        out.height = std::max(out.height, c.height + 1);
        if (c.min_tok >= 0) {
          out.min_tok = out.min_tok < 0 ? c.min_tok
                                        : std::min(out.min_tok, c.min_tok);
          out.max_tok = std::max(out.max_tok, c.max_tok);
        }
      }
    }
    info[v] = out;
    return out;
  };
  visit(graph.root, visit);

  std::vector<NodeSpan> spans;
  for (const auto& [v, i] : info) {
    if (i.min_tok < 0) continue;
    spans.push_back({v, i.min_tok, i.max_tok, i.height});
  }
  return spans;
}

InjectResult assign_mentions(const std::vector<AmrGraph>& sentences,
                             const std::vector<MentionCluster>& clusters,
                             const std::string& doc_id) {
  InjectResult result;
  result.annotation.doc_id = doc_id;

  std::map<std::string, int> sent_index;
  std::map<std::string, std::vector<NodeSpan>> spans;
  for (size_t i = 0; i < sentences.size(); ++i) {
    sent_index[sentences[i].id] = static_cast<int>(i);
    spans[sentences[i].id] = node_spans(sentences[i]);
  }

  struct Assigned {
    NodeRef node;
    int sent = 0;
    int start = 0;
    int end = 0;
  };
  struct Resolved {
    std::string cluster_id;
    std::vector<Assigned> members;
    std::tuple<int, int, int> first_mention{1 << 30, 0, 0};
  };
  std::vector<Resolved> resolved;

  for (const MentionCluster& cluster : clusters) {
    Resolved res;
    res.cluster_id = cluster.id;
    for (const Mention& m : cluster.mentions) {
      ++result.total_mentions;
      auto sit = sent_index.find(m.sent_id);
      if (sit == sent_index.end())
        throw IngestError("mention references unknown sentence '" +
                          m.sent_id + "'");
      const AmrGraph& sentence = sentences[sit->second];
      if (m.start > m.end || m.start < 0 ||
          m.end >= static_cast<int>(sentence.tokens.size()))
        throw IngestError("mention span [" + std::to_string(m.start) + ", " +
                          std::to_string(m.end) +
                          "] is out of range for sentence '" + m.sent_id +
                          "'");

      // Shortest containing span wins; ties break by greatest height, then
      // lowest variable name.
      const NodeSpan* best = nullptr;
      for (const NodeSpan& s : spans[m.sent_id]) {
        if (!(s.start <= m.start && m.end <= s.end)) continue;
        if (!best) {
          best = &s;
          continue;
        }
        int best_len = best->end - best->start;
        int len = s.end - s.start;
        if (len != best_len) {
          if (len < best_len) best = &s;
        } else if (s.height != best->height) {
          if (s.height > best->height) best = &s;
        } else if (s.variable < best->variable) {
          best = &s;
        }
      }
      if (!best) {
        ++result.dropped_mentions;
        result.warnings.push_back(
            "dropped mention " + m.sent_id + "[" + std::to_string(m.start) +
            ":" + std::to_string(m.end) + "] in cluster '" + cluster.id +
            "': no aligned node span contains it");
        continue;
      }
      ++result.assigned_mentions;
      Assigned a{NodeRef{m.sent_id, best->variable}, sit->second, m.start,
                 m.end};
      res.first_mention = std::min(
          res.first_mention, std::make_tuple(a.sent, a.start, a.end));
      res.members.push_back(std::move(a));
    }
    resolved.push_back(std::move(res));
  }

  std::stable_sort(resolved.begin(), resolved.end(),
                   [](const Resolved& a, const Resolved& b) {
                     return a.first_mention < b.first_mention;
                   });

  int chain_counter = 0;
  for (Resolved& res : resolved) {
    std::sort(res.members.begin(), res.members.end(),
              [](const Assigned& a, const Assigned& b) {
                return std::tie(a.sent, a.start, a.end, a.node.var) <
                       std::tie(b.sent, b.start, b.end, b.node.var);
              });
    IdentityChain chain;
    std::set<int> sentence_ids;
    for (const Assigned& a : res.members) {
      bool dup = false;
      for (const NodeRef& m : chain.members)
        if (m == a.node) dup = true;
      if (dup) continue;
      chain.members.push_back(a.node);
      sentence_ids.insert(a.sent);
    }
    // Within-sentence coreference is the sentence parser's job; only
    // cross-sentential clusters become chains.
    if (sentence_ids.size() < 2) continue;
    chain.id = "c" + std::to_string(chain_counter++);
    result.annotation.chains.push_back(std::move(chain));
  }
  return result;
}

MentionFile parse_mentions_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IngestError(std::string("mentions JSON parse error: ") + e.what());
  }
  MentionFile file;
  if (j.contains("doc_id")) file.doc_id = j.at("doc_id").get<std::string>();
  for (const json& cj : j.value("clusters", json::array())) {
    MentionCluster cluster;
    cluster.id = cj.at("id").get<std::string>();
    for (const json& mj : cj.at("mentions")) {
      Mention m;
      m.sent_id = mj.at("sent").get<std::string>();
      m.start = mj.at("start").get<int>();
      m.end = mj.at("end").get<int>();
      cluster.mentions.push_back(std::move(m));
    }
    file.clusters.push_back(std::move(cluster));
  }
  return file;
}

std::string serialize_mentions_json(const MentionFile& file) {
  json j;
  j["doc_id"] = file.doc_id;
  j["clusters"] = json::array();
  for (const MentionCluster& cluster : file.clusters) {
    json mentions = json::array();
    for (const Mention& m : cluster.mentions)
      mentions.push_back(
          json{{"sent", m.sent_id}, {"start", m.start}, {"end", m.end}});
    j["clusters"].push_back(json{{"id", cluster.id}, {"mentions", mentions}});
  }
  return j.dump(2) + "\n";
}

}  // namespace docamr
