#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sgforge/llm/types.hpp"
#include "sgforge/optimizer/code_graph.hpp"
#include "sgforge/optimizer/directives.hpp"

namespace sgforge::optimizer {

// System message for every generation round: code only, one fenced block.
std::string_view code_only_system_prompt();

// Builds the next-round request. The user message holds, in order: the
// original instruction, the current code, a functionality-preservation
// clause naming the graph's functions (omitted when `graph` is empty), and
// the numbered directives. Throws std::invalid_argument on empty directives.
llm::ChatRequest synthesize_prompt(std::string_view instruction, std::string_view code,
                                   std::span<const FixDirective> directives,
                                   const std::optional<CodeGraph>& graph);

}  // namespace sgforge::optimizer
