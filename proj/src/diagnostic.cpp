#include "thinging/diagnostic.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace thinging {

namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 15> kRegistry{{
    {"E001", "syntax-error"},
    {"E101", "unresolved-path"},
    {"E102", "illegal-flow-pair"},
    {"E103", "cross-boundary-non-transfer"},
    {"E104", "flow-into-create"},
    {"E105", "thing-identity-break"},
    {"E106", "duplicate-id"},
    {"W201", "same-thing-trigger"},
    {"W202", "isolated-machine"},
    {"E301", "region-not-subgraph"},
    {"E302", "chronology-cycle"},
    {"E303", "unknown-or-duplicate-event"},
    {"E401", "unresolved-choice"},
    {"E402", "step-limit-exceeded"},
    {"W401", "unconsumed-choice"},
}};

}  // namespace

std::string_view code_name(std::string_view code) {
  for (const auto& [c, name] : kRegistry) {
    if (c == code) return name;
  }
  return {};
}

bool has_errors(const Diagnostics& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::size_t count_code(const Diagnostics& diagnostics, std::string_view code) {
  return static_cast<std::size_t>(std::count_if(
      diagnostics.begin(), diagnostics.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

Diagnostic make_error(std::string_view code, std::string element, std::string message,
                      std::optional<SourceSpan> span) {
  return Diagnostic{std::string(code), Severity::Error, std::move(element), std::move(span),
                    std::move(message)};
}

Diagnostic make_warning(std::string_view code, std::string element, std::string message,
                        std::optional<SourceSpan> span) {
  return Diagnostic{std::string(code), Severity::Warning, std::move(element), std::move(span),
                    std::move(message)};
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  std::string out = d.severity == Severity::Error ? "error " : "warning ";
  out += d.code;
  out += ' ';
  if (d.span) {
    out += d.span->file.empty() ? std::string(file) : d.span->file;
    out += ':' + std::to_string(d.span->start_line) + ':' + std::to_string(d.span->start_col);
  } else {
    out += file;
    out += ':';
    out += d.element.empty() ? "-" : d.element;
  }
  out += ' ';
  out += d.message;
  return out;
}

}  // namespace thinging
