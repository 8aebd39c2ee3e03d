#include "sgforge/optimizer/registry.hpp"

#include "sgforge/error.hpp"
#include "sgforge/optimizer/code_graph.hpp"
#include "sgforge/optimizer/directives.hpp"
#include "sgforge/optimizer/prompt.hpp"

namespace sgforge::optimizer {

llm::ChatRequest RuleGraphOptimizer::optimize(std::string_view instruction, std::string_view code,
                                              std::span<const analysis::Finding> findings) const {
  const auto directives = derive_fix_directives(findings, UnknownCwePolicy::GenericTemplate);
  std::optional<CodeGraph> graph;
  try {
    graph = build_code_graph(code, node_cap_);
  } catch (const GraphTooLarge&) {
    graph.reset();
  }
  return synthesize_prompt(instruction, code, directives, graph);
}

void OptimizerRegistry::add(std::string key, std::shared_ptr<const PromptOptimizer> optimizer) {
  std::lock_guard lock(mu_);
  entries_[std::move(key)] = std::move(optimizer);
}

std::shared_ptr<const PromptOptimizer> OptimizerRegistry::get(std::string_view key) const {
  std::lock_guard lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw UnknownOptimizer("no optimizer registered as '" + std::string(key) + "'");
  return it->second;
}

bool OptimizerRegistry::contains(std::string_view key) const {
  std::lock_guard lock(mu_);
  return entries_.find(key) != entries_.end();
}

std::vector<std::string> OptimizerRegistry::keys() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [k, _] : entries_) out.push_back(k);
  return out;
}

OptimizerRegistry& OptimizerRegistry::global() {
  static OptimizerRegistry registry;
  static std::once_flag seeded;
  std::call_once(seeded, [] {
    registry.add(std::string(kDefaultOptimizerKey), std::make_shared<RuleGraphOptimizer>());
  });
  return registry;
}

}  // namespace sgforge::optimizer
