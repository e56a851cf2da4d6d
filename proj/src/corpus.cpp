#include "thinging/corpus.hpp"

#include <algorithm>
#include <map>

#include "corpus_data.hpp"

namespace thinging {

namespace {

CorpusEntry make_entry(const std::string& name, std::vector<std::string> scenario_names) {
  CorpusEntry entry;
  entry.name = name;
  entry.model_file = "corpus/" + name + ".tm";
  for (const auto& s : scenario_names) {
    entry.scenarios.push_back("corpus/" + s + ".scn");
    entry.golden.push_back(golden_trace_path(entry.scenarios.back()));
  }
  for (const char* view : {"static", "events", "chronology"}) {
    entry.golden.push_back(golden_dot_path(name, view));
  }
  return entry;
}

const std::map<std::string_view, std::string_view>& files() {
  static const std::map<std::string_view, std::string_view> table = [] {
    std::map<std::string_view, std::string_view> t;
    for (const auto& f : detail::kCorpusFiles) t.emplace(f.path, f.content);
    return t;
  }();
  return table;
}

}  // namespace

const std::vector<CorpusEntry>& corpus_list() {
  static const std::vector<CorpusEntry> entries{
      make_entry("reservoir", {"reservoir"}),
      make_entry("kant_ci", {"kant_agree", "kant_disagree"}),
      make_entry("murderer", {"murderer_truth", "murderer_lie"}),
      make_entry("islamic", {"islamic_gate_true", "islamic_gate_false"}),
  };
  return entries;
}

std::string golden_trace_path(std::string_view scenario) {
  std::string base(scenario);
  if (auto slash = base.rfind('/'); slash != std::string::npos) base.erase(0, slash + 1);
  if (auto dot = base.rfind('.'); dot != std::string::npos) base.erase(dot);
  return "corpus/golden/" + base + ".trace";
}

std::string golden_dot_path(std::string_view name, std::string_view view) {
  return "corpus/golden/" + std::string(name) + "." + std::string(view) + ".dot";
}

std::optional<std::string_view> embedded_file(std::string_view path) {
  auto it = files().find(path);
  if (it == files().end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> embedded_files() {
  std::vector<std::string> out;
  for (const auto& [path, content] : files()) out.emplace_back(path);
  return out;
}

}  // namespace thinging
