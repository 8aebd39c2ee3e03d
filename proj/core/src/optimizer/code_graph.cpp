#include "sgforge/optimizer/code_graph.hpp"

#include <set>

#include "sgforge/analysis/python_lexer.hpp"
#include "sgforge/error.hpp"

namespace sgforge::optimizer {
namespace {

using analysis::LogicalLine;
using analysis::Token;
using analysis::TokenKind;

const std::set<std::string, std::less<>> kControlKeywords = {
    "if",    "elif",  "else",     "for",   "while", "try",    "except", "finally", "with",
    "return", "raise", "break", "continue", "yield", "match", "case",   "assert"};

const std::set<std::string, std::less<>> kAssignOps = {"=",  "+=", "-=", "*=",  "/=",  "//=", "%=",
                                                        "**=", "&=", "|=", "^=", ">>=", "<<=", "@=", ":="};

std::size_t skip_async(const std::vector<Token>& t) {
  return (!t.empty() && t[0].is_name("async") && t.size() > 1) ? 1 : 0;
}

GraphNode classify(const LogicalLine& ll) {
  const auto& t = ll.tokens;
  GraphNode node;
  node.line = ll.first_line;
  const std::size_t k = skip_async(t);
  const Token& head = t[k];

  if (head.is_name("def") && k + 1 < t.size()) {
    node.kind = NodeKind::Function;
    node.label = t[k + 1].text;
    return node;
  }
  if (head.is_name("class") && k + 1 < t.size()) {
    node.kind = NodeKind::Other;
    node.label = t[k + 1].text;
    return node;
  }
  if (head.is_name("import") || head.is_name("from")) {
    node.kind = NodeKind::Import;
    for (std::size_t i = k + 1; i < t.size() && !t[i].is_name("import") && !t[i].is_name("as") &&
                                !t[i].is_op(",");
         ++i) {
      node.label += t[i].text;
    }
    return node;
  }
  if (head.kind == TokenKind::Name && kControlKeywords.contains(head.text)) {
    node.kind = NodeKind::Control;
    node.label = head.text;
    return node;
  }

  int depth = 0;
  for (std::size_t i = k; i < t.size(); ++i) {
    if (t[i].is_op("(") || t[i].is_op("[") || t[i].is_op("{")) ++depth;
    if (t[i].is_op(")") || t[i].is_op("]") || t[i].is_op("}")) --depth;
    if (depth == 0 && t[i].kind == TokenKind::Op && kAssignOps.contains(t[i].text)) {
      node.kind = NodeKind::Assignment;
      node.label = head.text;
      return node;
    }
  }

  if (head.kind == TokenKind::Name) {
    std::string dotted = head.text;
    std::size_t j = k + 1;
    while (j + 1 < t.size() && t[j].is_op(".") && t[j + 1].kind == TokenKind::Name) {
      dotted += "." + t[j + 1].text;
      j += 2;
    }
    if (j < t.size() && t[j].is_op("(")) {
      node.kind = NodeKind::Call;
      node.label = dotted;
      return node;
    }
  }
  node.kind = NodeKind::Other;
  node.label = head.text;
  return node;
}

bool opens_block(const LogicalLine& ll) { return ll.tokens.back().is_op(":"); }

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Function: return "function";
    case NodeKind::Assignment: return "assignment";
    case NodeKind::Call: return "call";
    case NodeKind::Import: return "import";
    case NodeKind::Control: return "control";
    case NodeKind::Other: return "other";
  }
  return "other";
}

std::string_view to_string(EdgeKind kind) { return kind == EdgeKind::Sequence ? "sequence" : "contains"; }

std::vector<std::string> CodeGraph::function_labels() const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    if (n.kind == NodeKind::Function) out.push_back(n.label);
  }
  return out;
}

CodeGraph build_code_graph(std::string_view source, std::size_t node_cap) {
  CodeGraph graph;
  struct Container {
    int indent;
    int id;
  };
  std::vector<Container> stack;
  int previous_top_level = -1;

  for (const auto& ll : analysis::tokenize(source)) {
    if (graph.nodes.size() >= node_cap) {
      throw GraphTooLarge("code graph exceeds the node cap of " + std::to_string(node_cap));
    }
    GraphNode node = classify(ll);
    node.id = static_cast<int>(graph.nodes.size());

    while (!stack.empty() && stack.back().indent >= ll.indent) stack.pop_back();
    if (!stack.empty()) {
      graph.edges.push_back({stack.back().id, node.id, EdgeKind::Contains});
    } else {
      if (previous_top_level >= 0) graph.edges.push_back({previous_top_level, node.id, EdgeKind::Sequence});
      previous_top_level = node.id;
    }

    const auto& t = ll.tokens;
    const std::size_t k = skip_async(t);
    if ((t[k].is_name("def") || t[k].is_name("class")) && opens_block(ll)) {
      stack.push_back({ll.indent, node.id});
    }
    graph.nodes.push_back(std::move(node));
  }
  return graph;
}

void to_json(nlohmann::json& j, const CodeGraph& g) {
  j = nlohmann::json{{"nodes", nlohmann::json::array()}, {"edges", nlohmann::json::array()}};
  for (const auto& n : g.nodes) {
    j["nodes"].push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"label", n.label}, {"line", n.line}});
  }
  for (const auto& e : g.edges) {
    j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
  }
}

}  // namespace sgforge::optimizer
