#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "thinging/diagnostic.hpp"
#include "thinging/model.hpp"

namespace thinging {

struct ParseOptions {
  std::string file = "<input>";
  bool lax = false;
};

struct ParseResult {
  std::optional<Model> model;
  Diagnostics diagnostics;
};

/// Parses `.tm` text. Syntax errors (E001) are collected with recovery at
/// line starts; when there are none the model is built, validated, and its
/// events and chronology checked. The model is present iff no diagnostic is
/// an error.
ParseResult parse(std::string_view text, const ParseOptions& options = {});

/// Canonical text: things, machines (depth first), flows, triggers, events,
/// chronology; one item per line, two-space indentation, `\n` newlines.
std::string serialize(const Model& model);

/// Reserved words of the language (keywords and stage kinds).
bool is_reserved_word(std::string_view word);

}  // namespace thinging
