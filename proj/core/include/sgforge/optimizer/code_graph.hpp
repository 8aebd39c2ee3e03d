#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sgforge::optimizer {

enum class NodeKind { Function, Assignment, Call, Import, Control, Other };
enum class EdgeKind { Sequence, Contains };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);

struct GraphNode {
  int id = 0;
  NodeKind kind = NodeKind::Other;
  std::string label;  // identifier, callee, module or keyword
  int line = 1;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  int from = 0;
  int to = 0;
  EdgeKind kind = EdgeKind::Sequence;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Statement-level graph of a program: one node per logical statement,
// `contains` edges from a def/class to its body statements, `sequence` edges
// between consecutive top-level statements.
struct CodeGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  std::vector<std::string> function_labels() const;

  friend bool operator==(const CodeGraph&, const CodeGraph&) = default;
};

inline constexpr std::size_t kDefaultNodeCap = 512;

// Throws GraphTooLarge when more than `node_cap` nodes would be produced.
CodeGraph build_code_graph(std::string_view source, std::size_t node_cap = kDefaultNodeCap);

void to_json(nlohmann::json& j, const CodeGraph& g);

}  // namespace sgforge::optimizer
