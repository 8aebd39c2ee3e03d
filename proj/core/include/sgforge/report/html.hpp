#pragma once

#include <string>
#include <string_view>

#include "sgforge/report/report.hpp"

namespace sgforge::report {

std::string html_escape(std::string_view text);

// Self-contained, deterministic share page: summary counts, original and
// secured issue tabs, the full diff, and the confidence counts as JSON in
// <script id="confidence-data" type="application/json">.
std::string render_html(const SecurityReport& report);

}  // namespace sgforge::report
