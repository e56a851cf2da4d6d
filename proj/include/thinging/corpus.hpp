#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thinging {

struct CorpusEntry {
  std::string name;
  std::string model_file;              // relative to the corpus root, e.g. "corpus/reservoir.tm"
  std::vector<std::string> scenarios;  // scenario files, same base
  std::vector<std::string> golden;     // expected traces (one per scenario) then DOT files
};

/// The bundled models in fixed order: reservoir, kant_ci, murderer, islamic.
const std::vector<CorpusEntry>& corpus_list();

/// Golden trace path for a scenario path ("corpus/x.scn" -> "corpus/golden/x.trace").
std::string golden_trace_path(std::string_view scenario);
/// Golden DOT path for a model and view ("corpus/golden/<name>.<view>.dot").
std::string golden_dot_path(std::string_view name, std::string_view view);

/// Content of a corpus file compiled into the binary, by its relative path.
std::optional<std::string_view> embedded_file(std::string_view path);
/// Relative paths of every embedded corpus file, sorted.
std::vector<std::string> embedded_files();

}  // namespace thinging
