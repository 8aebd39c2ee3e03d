#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgforge/analysis/finding.hpp"
#include "sgforge/llm/types.hpp"

namespace sgforge::optimizer {

// The pluggable prompt-optimization stage. The pipeline only sees this
// signature, so a learned optimizer can be dropped in behind a new key.
class PromptOptimizer {
 public:
  virtual ~PromptOptimizer() = default;

  virtual llm::ChatRequest optimize(std::string_view instruction, std::string_view code,
                                    std::span<const analysis::Finding> findings) const = 0;
};

// Default optimizer: statement graph + per-CWE directive templates. Falls
// back to directives-only prompting when the graph exceeds the node cap.
class RuleGraphOptimizer final : public PromptOptimizer {
 public:
  explicit RuleGraphOptimizer(std::size_t node_cap = 512) : node_cap_(node_cap) {}

  llm::ChatRequest optimize(std::string_view instruction, std::string_view code,
                            std::span<const analysis::Finding> findings) const override;

 private:
  std::size_t node_cap_;
};

inline constexpr std::string_view kDefaultOptimizerKey = "rule-graph";

class OptimizerRegistry {
 public:
  void add(std::string key, std::shared_ptr<const PromptOptimizer> optimizer);

  // Throws UnknownOptimizer.
  std::shared_ptr<const PromptOptimizer> get(std::string_view key) const;

  bool contains(std::string_view key) const;
  std::vector<std::string> keys() const;

  // Process-wide registry preloaded with "rule-graph".
  static OptimizerRegistry& global();

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const PromptOptimizer>, std::less<>> entries_;
};

}  // namespace sgforge::optimizer
