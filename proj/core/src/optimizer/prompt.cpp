#include "sgforge/optimizer/prompt.hpp"

#include <stdexcept>

namespace sgforge::optimizer {

std::string_view code_only_system_prompt() {
  return "You are a careful software engineer who writes secure Python code. "
         "Reply with the complete program only, inside a single fenced code block, "
         "with no explanation before or after it.";
}

llm::ChatRequest synthesize_prompt(std::string_view instruction, std::string_view code,
                                   std::span<const FixDirective> directives,
                                   const std::optional<CodeGraph>& graph) {
  if (directives.empty()) {
    throw std::invalid_argument("synthesize_prompt requires at least one fix directive");
  }

  std::string user;
  user += "Task:\n";
  user += instruction;
  user += "\n\nCurrent code:\n```python\n";
  user += code;
  if (!code.empty() && code.back() != '\n') user += '\n';
  user += "```\n\n";

  if (graph) {
    const auto functions = graph->function_labels();
    if (functions.empty()) {
      user += "Preserve the existing functionality: keep the program's observable behaviour unchanged.\n\n";
    } else {
      user += "Preserve the existing functionality: keep the functions ";
      for (std::size_t i = 0; i < functions.size(); ++i) {
        if (i > 0) user += ", ";
        user += "`" + functions[i] + "`";
      }
      user += " with their current names and parameters, and keep their behaviour unchanged.\n\n";
    }
  }

  user += "Apply these security fixes:\n";
  for (std::size_t i = 0; i < directives.size(); ++i) {
    user += std::to_string(i + 1) + ". " + directives[i].instruction + "\n";
  }

  llm::ChatRequest request;
  request.messages.push_back({llm::Role::System, std::string(code_only_system_prompt())});
  request.messages.push_back({llm::Role::User, std::move(user)});
  return request;
}

}  // namespace sgforge::optimizer
