#include "thinging/model.hpp"

#include <algorithm>
#include <set>

namespace thinging {

std::string_view to_string(StageKind kind) {
  switch (kind) {
    case StageKind::Create: return "create";
    case StageKind::Process: return "process";
    case StageKind::Release: return "release";
    case StageKind::Transfer: return "transfer";
    case StageKind::Receive: return "receive";
  }
  return "?";
}

std::optional<StageKind> parse_stage_kind(std::string_view word) {
  for (StageKind k : kAllStageKinds) {
    if (to_string(k) == word) return k;
  }
  return std::nullopt;
}

std::string join_path(const MachinePath& path) {
  std::string out;
  for (const auto& seg : path) {
    if (!out.empty()) out += '.';
    out += seg;
  }
  return out;
}

std::string StageRef::str() const {
  return join_path(machine_path) + "." + std::string(to_string(kind));
}

StageRef env_transfer() { return StageRef{{std::string(kEnvMachine)}, StageKind::Transfer}; }

bool within(const MachinePath& inner, const MachinePath& outer) {
  return inner.size() >= outer.size() && std::equal(outer.begin(), outer.end(), inner.begin());
}

std::string FlowEdge::str() const { return thing + " " + src.str() + " -> " + dst.str(); }

std::string TriggerEdge::str() const { return src.str() + " ~> " + dst.str(); }

const Thing* Model::find_thing(std::string_view n) const {
  auto it = std::find_if(things.begin(), things.end(), [&](const Thing& t) { return t.name == n; });
  return it == things.end() ? nullptr : &*it;
}

const Machine* Model::find_machine(const MachinePath& path) const {
  auto idx = machine_index(path);
  return idx ? &machines[*idx] : nullptr;
}

std::optional<std::size_t> Model::machine_index(const MachinePath& path) const {
  const std::string id = join_path(path);
  for (std::size_t i = 0; i < machines.size(); ++i) {
    if (machines[i].id == id) return i;
  }
  return std::nullopt;
}

const FlowEdge* Model::find_flow(std::string_view id) const {
  auto it = std::find_if(flows.begin(), flows.end(), [&](const FlowEdge& f) { return f.id == id; });
  return it == flows.end() ? nullptr : &*it;
}

const TriggerEdge* Model::find_trigger(std::string_view id) const {
  auto it = std::find_if(triggers.begin(), triggers.end(),
                         [&](const TriggerEdge& t) { return t.id == id; });
  return it == triggers.end() ? nullptr : &*it;
}

const Event* Model::find_event(std::string_view n) const {
  auto it = std::find_if(events.begin(), events.end(), [&](const Event& e) { return e.name == n; });
  return it == events.end() ? nullptr : &*it;
}

MachinePath Model::path_of(std::size_t machine) const {
  MachinePath path;
  std::optional<std::size_t> cur = machine;
  while (cur) {
    path.push_back(machines[*cur].name);
    cur = machines[*cur].parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::optional<SourceSpan> Model::span_of(const std::string& key) const {
  auto it = spans.find(key);
  if (it == spans.end()) return std::nullopt;
  return it->second;
}

std::vector<StageRef> used_stages(const Model& model) {
  std::vector<StageRef> out;
  std::set<StageRef> seen;
  auto touch = [&](const StageRef& s) {
    if (seen.insert(s).second) out.push_back(s);
  };
  for (const auto& f : model.flows) {
    touch(f.src);
    touch(f.dst);
  }
  for (const auto& t : model.triggers) {
    touch(t.src);
    touch(t.dst);
  }
  return out;
}

bool stage_in_use(const Model& model, const StageRef& stage) {
  for (const auto& f : model.flows) {
    if (f.src == stage || f.dst == stage) return true;
  }
  for (const auto& t : model.triggers) {
    if (t.src == stage || t.dst == stage) return true;
  }
  return false;
}

}  // namespace thinging
