#include "docamr/penman.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "docamr/errors.hpp"

namespace docamr {

namespace {

// Roles ending in "-of" that are forward roles, not inverses.
bool is_non_inverse_of_role(const std::string& role) {
  return role == ":consist-of" || role == ":prep-out-of" ||
         role == ":prep-on-behalf-of";
}

bool is_inverse_role(const std::string& role) {
  return role.size() > 3 && role.compare(role.size() - 3, 3, "-of") == 0 &&
         !is_non_inverse_of_role(role);
}

std::string invert_role(const std::string& role) {
  if (is_inverse_role(role)) return role.substr(0, role.size() - 3);
  return role + "-of";
}

struct Token {
  enum Kind { kLParen, kRParen, kSlash, kString, kAtom, kEnd } kind;
  std::string text;       // atom text or quoted string including quotes
  std::string alignment;  // raw text after '~', empty when absent
  int line = 0;
  int col = 0;
};

class Lexer {
 public:
  Lexer(std::string_view text, int first_line)
      : text_(text), line_(first_line) {}

  Token next() {
    skip_space();
    Token tok;
    tok.line = line_;
    tok.col = col_;
    if (pos_ >= text_.size()) {
      tok.kind = Token::kEnd;
      return tok;
    }
    char c = text_[pos_];
    if (c == '(') {
      advance();
      tok.kind = Token::kLParen;
      return tok;
    }
    if (c == ')') {
      advance();
      tok.kind = Token::kRParen;
      return tok;
    }
    if (c == '/') {
      advance();
      tok.kind = Token::kSlash;
      return tok;
    }
    if (c == '"') {
      tok.kind = Token::kString;
      tok.text = read_string();
      tok.alignment = read_alignment();
      return tok;
    }
    tok.kind = Token::kAtom;
    tok.text = read_atom();
    if (tok.text.empty())
      throw ParseError("unexpected character '" + std::string(1, c) + "'",
                       line_, col_);
    tok.alignment = read_alignment();
    return tok;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance();
  }

  std::string read_string() {
    int sline = line_, scol = col_;
    std::string out;
    out.push_back('"');
    advance();  // opening quote
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '\n')
        throw ParseError("unterminated string literal", sline, scol);
      if (c == '\\' && pos_ + 1 < text_.size()) {
        out.push_back(c);
        advance();
        out.push_back(text_[pos_]);
        advance();
        continue;
      }
      out.push_back(c);
      advance();
      if (c == '"') return out;
    }
    throw ParseError("unterminated string literal", sline, scol);
  }

  std::string read_atom() {
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
          c == ')' || c == '/' || c == '"' || c == '~')
        break;
      out.push_back(c);
      advance();
    }
    return out;
  }

  std::string read_alignment() {
    if (pos_ >= text_.size() || text_[pos_] != '~') return {};
    advance();
    std::string out;
    // ISI form "e.3,4" or plain "3,4"
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == ',' ||
          c == '.' || c == 'e') {
        out.push_back(c);
        advance();
      } else {
        break;
      }
    }
    return out;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_;
  int col_ = 1;
};

std::set<int> parse_alignment_marker(const std::string& raw) {
  std::set<int> out;
  std::string body = raw;
  if (body.rfind("e.", 0) == 0) body = body.substr(2);
  std::stringstream ss(body);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    if (piece.empty()) continue;
    bool digits = std::all_of(piece.begin(), piece.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c));
    });
    if (!digits) continue;
    out.insert(std::stoi(piece));
  }
  return out;
}

// Raw parse tree, resolved into triples once all declarations are known.
struct RawItem {
  std::string role;
  enum Kind { kChild, kString, kToken } kind;
  int child = -1;       // index into RawNode pool
  std::string value;    // token or string text
  std::string alignment;
  int line = 0, col = 0;
};

struct RawNode {
  Var var;
  std::string concept_name;
  std::string alignment;  // from var or concept token
  std::vector<RawItem> items;
  int line = 0, col = 0;
};

class BlockParser {
 public:
  BlockParser(std::string_view text, int first_line)
      : lexer_(text, first_line) {
    tok_ = lexer_.next();
  }

  AmrGraph parse() {
    int root = parse_node();
    if (tok_.kind != Token::kEnd)
      throw ParseError("trailing content after graph", tok_.line, tok_.col);

    AmrGraph g;
    // Declarations first so bare tokens can be resolved as references.
    for (const RawNode& node : nodes_) {
      auto it = g.instances.find(node.var);
      if (it != g.instances.end()) {
        std::string what = it->second == node.concept_name
                               ? "duplicate declaration of variable '"
                               : "conflicting concept for variable '";
        throw GraphError(what + node.var + "' (line " +
                         std::to_string(node.line) + ")");
      }
      g.instances[node.var] = node.concept_name;
      if (!node.alignment.empty()) {
        auto toks = parse_alignment_marker(node.alignment);
        g.alignments[node.var].insert(toks.begin(), toks.end());
      }
    }
    g.root = nodes_[root].var;
    for (const RawNode& node : nodes_) resolve_items(g, node);
    return g;
  }

 private:
  void expect(Token::Kind kind, const char* what) {
    if (tok_.kind != kind)
      throw ParseError(std::string("expected ") + what, tok_.line, tok_.col);
  }

  void bump() { tok_ = lexer_.next(); }

  int parse_node() {
    expect(Token::kLParen, "'('");
    RawNode node;
    node.line = tok_.line;
    node.col = tok_.col;
    bump();
    expect(Token::kAtom, "variable name");
    node.var = tok_.text;
    node.alignment = tok_.alignment;
    bump();
    expect(Token::kSlash, "'/' after variable");
    bump();
    if (tok_.kind != Token::kAtom && tok_.kind != Token::kString)
      throw ParseError("expected concept after '/'", tok_.line, tok_.col);
    node.concept_name = tok_.text;
    if (!tok_.alignment.empty()) node.alignment = tok_.alignment;
    bump();

    int index = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    while (tok_.kind != Token::kRParen) {
      if (tok_.kind == Token::kEnd)
        throw ParseError("unbalanced '(': missing ')'", nodes_[index].line,
                         nodes_[index].col);
      expect(Token::kAtom, "role label");
      if (tok_.text[0] != ':')
        throw ParseError("expected role label starting with ':'", tok_.line,
                         tok_.col);
      RawItem item;
      item.role = tok_.text;
      item.line = tok_.line;
      item.col = tok_.col;
      bump();
      switch (tok_.kind) {
        case Token::kLParen:
          item.kind = RawItem::kChild;
          item.child = parse_node();
          break;
        case Token::kString:
          item.kind = RawItem::kString;
          item.value = tok_.text;
          item.alignment = tok_.alignment;
          bump();
          break;
        case Token::kAtom:
          item.kind = RawItem::kToken;
          item.value = tok_.text;
          item.alignment = tok_.alignment;
          bump();
          break;
        default:
          throw ParseError("expected value after role '" + item.role + "'",
                           tok_.line, tok_.col);
      }
      nodes_[index].items.push_back(std::move(item));
    }
    bump();  // ')'
    return index;
  }

  void add_relation(AmrGraph& g, const Var& src, const std::string& role,
                    const Var& tgt) {
    if (is_inverse_role(role))
      g.add_relation(tgt, role.substr(0, role.size() - 3), src,
                     /*inverted=*/true);
    else
      g.add_relation(src, role, tgt, /*inverted=*/false);
  }

  void resolve_items(AmrGraph& g, const RawNode& node) {
    for (const RawItem& item : node.items) {
      switch (item.kind) {
        case RawItem::kChild:
          add_relation(g, node.var, item.role, nodes_[item.child].var);
          break;
        case RawItem::kString:
          g.add_attribute(node.var, item.role, item.value);
          if (!item.alignment.empty()) {
            auto toks = parse_alignment_marker(item.alignment);
            g.alignments[node.var].insert(toks.begin(), toks.end());
          }
          break;
        case RawItem::kToken:
          if (g.instances.count(item.value)) {
            add_relation(g, node.var, item.role, item.value);
            if (!item.alignment.empty()) {
              auto toks = parse_alignment_marker(item.alignment);
              g.alignments[item.value].insert(toks.begin(), toks.end());
            }
          } else if (looks_like_variable(item.value)) {
            throw GraphError("dangling variable reference '" + item.value +
                             "' (line " + std::to_string(item.line) +
                             ", column " + std::to_string(item.col) + ")");
          } else {
            g.add_attribute(node.var, item.role, item.value);
            if (!item.alignment.empty()) {
              auto toks = parse_alignment_marker(item.alignment);
              g.alignments[node.var].insert(toks.begin(), toks.end());
            }
          }
          break;
      }
    }
  }

  Lexer lexer_;
  Token tok_;
  std::vector<RawNode> nodes_;
};

struct PendingBlock {
  std::vector<std::string> metadata;
  std::string text;
  int first_line = 0;
};

void apply_metadata(AmrGraph& g, const std::vector<std::string>& metadata) {
  g.metadata = metadata;
  for (const std::string& line : metadata) {
    size_t key_start = line.find("::");
    if (key_start == std::string::npos) continue;
    size_t key_end = line.find_first_of(" \t", key_start);
    std::string key = line.substr(key_start + 2,
                                  key_end == std::string::npos
                                      ? std::string::npos
                                      : key_end - key_start - 2);
    std::string rest;
    if (key_end != std::string::npos) {
      size_t val = line.find_first_not_of(" \t", key_end);
      if (val != std::string::npos) rest = line.substr(val);
    }
    if (key == "id") {
      g.id = rest;
    } else if (key == "tok") {
      g.tokens.clear();
      std::stringstream ss(rest);
      std::string t;
      while (ss >> t) g.tokens.push_back(t);
    }
  }
}

}  // namespace

std::vector<AmrGraph> parse_penman(std::string_view text) {
  std::vector<AmrGraph> graphs;
  PendingBlock block;
  int depth = 0;
  int line_no = 0;
  size_t pos = 0;

  auto flush = [&]() {
    if (block.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      // blank or metadata-only block (trailing comments): nothing to parse
      block = PendingBlock{};
      return;
    }
    BlockParser parser(block.text, block.first_line);
    AmrGraph g = parser.parse();
    apply_metadata(g, block.metadata);
    g.validate();
    graphs.push_back(std::move(g));
    block = PendingBlock{};
  };

  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string line(text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos));
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    size_t first = line.find_first_not_of(" \t");
    bool blank = first == std::string::npos;
    bool comment = !blank && line[first] == '#';

    if (depth == 0 && comment) {
      block.metadata.push_back(line);
    } else if (depth == 0 && blank) {
      flush();
    } else if (comment && depth > 0) {
      throw ParseError("metadata line inside a graph", line_no,
                       static_cast<int>(first) + 1);
    } else {
      if (block.text.empty()) block.first_line = line_no;
      // Track parenthesis depth outside quoted strings to find block ends.
      bool in_string = false;
      for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_string) {
          if (c == '\\') {
            ++i;
          } else if (c == '"') {
            in_string = false;
          }
          continue;
        }
        if (c == '"') {
          in_string = true;
        } else if (c == '(') {
          ++depth;
        } else if (c == ')') {
          --depth;
          if (depth < 0)
            throw ParseError("unbalanced ')'", line_no,
                             static_cast<int>(i) + 1);
        }
      }
      if (!block.text.empty()) block.text.push_back('\n');
      block.text += line;
      if (depth == 0) flush();
    }

    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (depth > 0)
    throw ParseError("unbalanced '(': missing ')' at end of input", line_no,
                     1);
  flush();
  return graphs;
}

AmrGraph parse_penman_one(std::string_view text) {
  std::vector<AmrGraph> graphs = parse_penman(text);
  if (graphs.size() != 1)
    throw GraphError("expected exactly one graph, found " +
                     std::to_string(graphs.size()));
  return graphs[0];
}

std::vector<AmrGraph> parse_penman_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_penman(ss.str());
}

SpanningTree print_spanning_tree(const AmrGraph& graph) {
  SpanningTree tree;
  const auto& rels = graph.relations;
  tree.is_tree_edge.assign(rels.size(), 0);
  std::vector<char> assigned(rels.size(), 0);

  // Relation indices incident to each variable; "natural" side is the
  // endpoint the original serialization printed the edge from.
  std::map<Var, std::vector<int>> natural_at, incident;
  for (size_t i = 0; i < rels.size(); ++i) {
    const Relation& r = rels[i];
    natural_at[r.inverted ? r.target : r.source].push_back(
        static_cast<int>(i));
    incident[r.source].push_back(static_cast<int>(i));
    if (r.target != r.source) incident[r.target].push_back(static_cast<int>(i));
  }

  std::map<Var, int> visit_index;
  auto label_from = [&](int i, const Var& v) {
    const Relation& r = rels[i];
    return r.source == v ? r.role : invert_role(r.role);
  };

  // Depth-first from the root following original orientations; items at a
  // node are ordered by (printed role label, original occurrence).
  std::vector<Var> stack;
  auto visit = [&](const Var& v, auto&& self) -> void {
    visit_index[v] = static_cast<int>(tree.visit_order.size());
    tree.visit_order.push_back(v);
    std::vector<int> local = natural_at.count(v) ? natural_at[v]
                                                 : std::vector<int>{};
    std::stable_sort(local.begin(), local.end(), [&](int a, int b) {
      auto la = label_from(a, v), lb = label_from(b, v);
      if (la != lb) return la < lb;
      return rels[a].seq < rels[b].seq;
    });
    for (int i : local) {
      if (assigned[i]) continue;
      assigned[i] = 1;
      const Relation& r = rels[i];
      Var other = r.source == v ? r.target : r.source;
      if (other != v && !visit_index.count(other)) {
        tree.is_tree_edge[i] = 1;
        tree.tree_children[v].push_back(i);
        self(other, self);
      } else {
        tree.ref_edges[v].push_back(i);
      }
    }
  };

  if (!graph.instances.count(graph.root))
    throw GraphError("root variable '" + graph.root + "' is not declared");
  visit(graph.root, visit);

  // Connectivity fallback: when original orientations leave nodes
  // unreached, traverse against orientation from the earliest visited node.
  while (tree.visit_order.size() < graph.instances.size()) {
    int best_rel = -1;
    Var best_at;
    std::tuple<int, std::string, int> best_key;
    for (const Var& v : tree.visit_order) {
      auto it = incident.find(v);
      if (it == incident.end()) continue;
      for (int i : it->second) {
        if (assigned[i]) continue;
        const Relation& r = rels[i];
        Var other = r.source == v ? r.target : r.source;
        if (visit_index.count(other)) continue;
        std::tuple<int, std::string, int> key{visit_index[v],
                                              label_from(i, v), r.seq};
        if (best_rel < 0 || key < best_key) {
          best_rel = i;
          best_at = v;
          best_key = key;
        }
      }
    }
    if (best_rel < 0) {
      std::string names;
      for (const auto& [v, c] : graph.instances)
        if (!visit_index.count(v)) names += (names.empty() ? "" : ", ") + v;
      throw GraphError("graph is disconnected; unreachable variables: " +
                       names);
    }
    assigned[best_rel] = 1;
    tree.is_tree_edge[best_rel] = 1;
    tree.tree_children[best_at].push_back(best_rel);
    const Relation& r = rels[best_rel];
    Var other = r.source == best_at ? r.target : r.source;
    visit(other, visit);
  }

  // Any relation still unassigned has both endpoints visited; print it as a
  // reference at its natural endpoint.
  for (size_t i = 0; i < rels.size(); ++i) {
    if (assigned[i]) continue;
    const Relation& r = rels[i];
    tree.ref_edges[r.inverted ? r.target : r.source].push_back(
        static_cast<int>(i));
  }
  return tree;
}

namespace {

std::string alignment_suffix(const AmrGraph& g, const Var& v) {
  auto it = g.alignments.find(v);
  if (it == g.alignments.end() || it->second.empty()) return {};
  std::string out = "~";
  bool first = true;
  for (int t : it->second) {
    if (!first) out += ",";
    out += std::to_string(t);
    first = false;
  }
  return out;
}

struct PrintItem {
  std::string label;
  int seq;
  enum Kind { kAttr, kTree, kRef } kind;
  int index;  // attribute index or relation index
};

void emit_node(const AmrGraph& g, const SpanningTree& tree,
               const std::map<Var, std::vector<int>>& attrs_at, const Var& v,
               int depth, std::string& out) {
  out += "(" + v + " / " + g.concept_of(v) + alignment_suffix(g, v);

  std::vector<PrintItem> items;
  if (auto it = attrs_at.find(v); it != attrs_at.end())
    for (int i : it->second)
      items.push_back({g.attributes[i].role, g.attributes[i].seq,
                       PrintItem::kAttr, i});
  auto rel_label = [&](int i) {
    const Relation& r = g.relations[i];
    return r.source == v ? r.role : r.role + "-of";
  };
  if (auto it = tree.tree_children.find(v); it != tree.tree_children.end())
    for (int i : it->second)
      items.push_back({rel_label(i), g.relations[i].seq, PrintItem::kTree, i});
  if (auto it = tree.ref_edges.find(v); it != tree.ref_edges.end())
    for (int i : it->second)
      items.push_back({rel_label(i), g.relations[i].seq, PrintItem::kRef, i});

  std::sort(items.begin(), items.end(), [](const PrintItem& a,
                                           const PrintItem& b) {
    if (a.label != b.label) return a.label < b.label;
    return a.seq < b.seq;
  });

  std::string indent(4 * (depth + 1), ' ');
  for (const PrintItem& item : items) {
    out += "\n" + indent + item.label + " ";
    switch (item.kind) {
      case PrintItem::kAttr:
        out += g.attributes[item.index].value;
        break;
      case PrintItem::kTree: {
        const Relation& r = g.relations[item.index];
        emit_node(g, tree, attrs_at, r.source == v ? r.target : r.source,
                  depth + 1, out);
        break;
      }
      case PrintItem::kRef: {
        const Relation& r = g.relations[item.index];
        out += (r.source == v ? r.target : r.source);
        break;
      }
    }
  }
  out += ")";
}

}  // namespace

std::string print_penman(const AmrGraph& graph, bool with_metadata) {
  graph.validate();
  SpanningTree tree = print_spanning_tree(graph);

  std::map<Var, std::vector<int>> attrs_at;
  for (size_t i = 0; i < graph.attributes.size(); ++i)
    attrs_at[graph.attributes[i].source].push_back(static_cast<int>(i));

  std::string out;
  if (with_metadata) {
    if (!graph.metadata.empty()) {
      for (const std::string& line : graph.metadata) out += line + "\n";
    } else if (!graph.id.empty()) {
      out += "# ::id " + graph.id + "\n";
    }
  }
  emit_node(graph, tree, attrs_at, graph.root, 0, out);
  out += "\n";
  return out;
}

std::string print_penman_file(const std::vector<AmrGraph>& graphs) {
  std::string out;
  for (size_t i = 0; i < graphs.size(); ++i) {
    if (i) out += "\n";
    out += print_penman(graphs[i]);
  }
  return out;
}

}  // namespace docamr
