#include "thinging/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace thinging {

namespace {

std::string stage_text(const StagePath& p) {
  return join_path(p.segments) + "." + std::string(to_string(p.kind));
}

bool same_pair(StageKind a, StageKind b, StageKind x, StageKind y) { return a == x && b == y; }

void flatten_machines(const std::vector<MachineDecl>& decls, std::optional<std::size_t> parent,
                      const std::string& prefix, Model& model, Diagnostics& diags) {
  std::set<std::string> siblings;
  for (const auto& decl : decls) {
    const std::string id = prefix.empty() ? decl.name : prefix + "." + decl.name;
    if (!parent && decl.name == kEnvMachine) {
      diags.push_back(make_error(codes::kDuplicateId, id,
                                 "machine 'env' is reserved and implicitly declared", decl.span));
      continue;
    }
    if (!siblings.insert(decl.name).second) {
      diags.push_back(
          make_error(codes::kDuplicateId, id, "duplicate machine '" + id + "'", decl.span));
      continue;
    }
    const std::size_t index = model.machines.size();
    model.machines.push_back(Machine{id, decl.name, parent, {}});
    if (parent) {
      model.machines[*parent].children.push_back(index);
    } else {
      model.roots.push_back(index);
    }
    if (decl.span) model.spans["machine:" + id] = *decl.span;
    flatten_machines(decl.children, index, id, model, diags);
  }
}

// Resolves a written stage path against the machine tree.
std::optional<StageRef> resolve_stage(const Model& model, const StagePath& p,
                                      const std::string& element, Diagnostics& diags) {
  if (p.segments.empty()) {
    diags.push_back(make_error(codes::kUnresolvedPath, element, "empty stage path", p.span));
    return std::nullopt;
  }
  if (p.segments.front() == kEnvMachine) {
    if (p.segments.size() > 1) {
      diags.push_back(make_error(codes::kUnresolvedPath, element,
                                 "unknown path segment '" + p.segments[1] + "' in '" +
                                     stage_text(p) + "'",
                                 p.span));
      return std::nullopt;
    }
    if (p.kind != StageKind::Transfer) {
      diags.push_back(make_error(codes::kUnresolvedPath, element,
                                 "'env' has only a transfer stage ('" + stage_text(p) + "')",
                                 p.span));
      return std::nullopt;
    }
    return env_transfer();
  }
  MachinePath prefix;
  for (const auto& seg : p.segments) {
    prefix.push_back(seg);
    if (!model.find_machine(prefix)) {
      diags.push_back(make_error(
          codes::kUnresolvedPath, element,
          "unknown path segment '" + seg + "' in '" + stage_text(p) + "'", p.span));
      return std::nullopt;
    }
  }
  return StageRef{p.segments, p.kind};
}

}  // namespace

bool flow_legal(StageKind src, StageKind dst, bool same_machine) {
  using K = StageKind;
  if (!same_machine) return src == K::Transfer && dst == K::Transfer;
  return same_pair(src, dst, K::Create, K::Process) || same_pair(src, dst, K::Create, K::Release) ||
         same_pair(src, dst, K::Receive, K::Process) ||
         same_pair(src, dst, K::Receive, K::Release) ||
         same_pair(src, dst, K::Process, K::Release) ||
         same_pair(src, dst, K::Release, K::Transfer) ||
         same_pair(src, dst, K::Transfer, K::Receive);
}

std::vector<std::string> things_at(const Model& model, const StageRef& stage) {
  std::vector<std::string> out;
  for (const auto& f : model.flows) {
    if ((f.src == stage || f.dst == stage) &&
        std::find(out.begin(), out.end(), f.thing) == out.end()) {
      out.push_back(f.thing);
    }
  }
  return out;
}

Result<Model> build_model(const ModelElements& elements, ValidateOptions options) {
  Diagnostics diags;
  Model model;
  model.name = elements.name;

  std::set<std::string> thing_names;
  for (const auto& decl : elements.things) {
    if (!thing_names.insert(decl.name).second) {
      diags.push_back(make_error(codes::kDuplicateId, decl.name,
                                 "duplicate thing '" + decl.name + "'", decl.span));
      continue;
    }
    model.things.push_back(Thing{decl.name, decl.name, std::nullopt});
    if (decl.span) model.spans["thing:" + decl.name] = *decl.span;
  }

  flatten_machines(elements.machines, std::nullopt, "", model, diags);
  for (auto& thing : model.things) {
    if (model.find_machine({thing.name})) thing.as_machine = thing.name;
  }

  std::set<std::string> flow_keys;
  for (std::size_t i = 0; i < elements.flows.size(); ++i) {
    const auto& decl = elements.flows[i];
    const std::string id = "f" + std::to_string(i + 1);
    bool ok = true;
    if (!model.find_thing(decl.thing)) {
      diags.push_back(
          make_error(codes::kUnresolvedPath, id, "unknown thing '" + decl.thing + "'", decl.span));
      ok = false;
    }
    auto src = resolve_stage(model, decl.src, id, diags);
    auto dst = resolve_stage(model, decl.dst, id, diags);
    if (!ok || !src || !dst) continue;
    FlowEdge edge{id, decl.thing, *src, *dst};
    if (!flow_keys.insert(edge.str()).second) {
      diags.push_back(
          make_error(codes::kDuplicateId, id, "duplicate flow '" + edge.str() + "'", decl.span));
      continue;
    }
    model.flows.push_back(std::move(edge));
    if (decl.span) model.spans["flow:" + id] = *decl.span;
  }

  std::set<std::string> trigger_keys;
  for (std::size_t i = 0; i < elements.triggers.size(); ++i) {
    const auto& decl = elements.triggers[i];
    const std::string id = "t" + std::to_string(i + 1);
    auto src = resolve_stage(model, decl.src, id, diags);
    auto dst = resolve_stage(model, decl.dst, id, diags);
    if (!src || !dst) continue;
    TriggerEdge edge{id, *src, *dst};
    if (!trigger_keys.insert(edge.str()).second) {
      diags.push_back(make_error(codes::kDuplicateId, id, "duplicate trigger '" + edge.str() + "'",
                                 decl.span));
      continue;
    }
    model.triggers.push_back(std::move(edge));
    if (decl.span) model.spans["trigger:" + id] = *decl.span;
  }

  Diagnostics found = validate(model, options);
  diags.insert(diags.end(), found.begin(), found.end());

  Result<Model> result;
  if (!has_errors(diags)) result.value = std::move(model);
  result.diagnostics = std::move(diags);
  return result;
}

Diagnostics validate(const Model& model, ValidateOptions options) {
  Diagnostics diags;

  std::set<std::string> ids;
  for (const auto& t : model.things) {
    if (!ids.insert("thing:" + t.id).second) {
      diags.push_back(make_error(codes::kDuplicateId, t.id, "duplicate thing '" + t.id + "'",
                                 model.span_of("thing:" + t.id)));
    }
    if (t.as_machine && !model.find_machine({*t.as_machine})) {
      diags.push_back(make_error(codes::kUnresolvedPath, t.id,
                                 "thing '" + t.id + "' refers to unknown machine '" +
                                     *t.as_machine + "'",
                                 model.span_of("thing:" + t.id)));
    }
  }
  for (const auto& m : model.machines) {
    if (!ids.insert("machine:" + m.id).second) {
      diags.push_back(make_error(codes::kDuplicateId, m.id, "duplicate machine '" + m.id + "'",
                                 model.span_of("machine:" + m.id)));
    }
  }

  auto resolves = [&](const StageRef& s) { return s.is_env() || model.find_machine(s.machine_path); };
  auto env_ok = [](const StageRef& s) { return !s.is_env() || s.kind == StageKind::Transfer; };

  for (const auto& f : model.flows) {
    const std::string key = "flow:" + f.id;
    const auto span = model.span_of(key);
    if (!ids.insert(key).second) {
      diags.push_back(make_error(codes::kDuplicateId, f.id, "duplicate flow id '" + f.id + "'", span));
    }
    if (!model.find_thing(f.thing)) {
      diags.push_back(
          make_error(codes::kUnresolvedPath, f.id, "unknown thing '" + f.thing + "'", span));
    }
    bool endpoints_ok = true;
    for (const StageRef* s : {&f.src, &f.dst}) {
      if (!resolves(*s) || !env_ok(*s)) {
        diags.push_back(
            make_error(codes::kUnresolvedPath, f.id, "unresolved stage '" + s->str() + "'", span));
        endpoints_ok = false;
      }
    }
    if (!endpoints_ok) continue;

    const bool same = f.src.machine_path == f.dst.machine_path;
    if (f.dst.kind == StageKind::Create) {
      diags.push_back(make_error(codes::kFlowIntoCreate, f.id,
                                 "flow into create stage '" + f.dst.str() + "'", span));
    } else if (!flow_legal(f.src.kind, f.dst.kind, same)) {
      if (!same) {
        std::string msg = "flow '" + f.str() + "' crosses a machine boundary without transfer";
        diags.push_back(options.lax ? make_warning(codes::kCrossBoundary, f.id, msg, span)
                                    : make_error(codes::kCrossBoundary, f.id, msg, span));
      } else {
        diags.push_back(make_error(codes::kIllegalFlowPair, f.id,
                                   "illegal stage pair " + std::string(to_string(f.src.kind)) +
                                       " -> " + std::string(to_string(f.dst.kind)),
                                   span));
      }
    }

    // A thing only enters a stage by creation, from the outside, or along a
    // flow of the same thing.
    if (f.src.kind != StageKind::Create && !f.src.is_env()) {
      const bool fed = std::any_of(model.flows.begin(), model.flows.end(), [&](const FlowEdge& g) {
        return g.thing == f.thing && g.dst == f.src;
      });
      if (!fed) {
        diags.push_back(make_error(codes::kIdentityBreak, f.id,
                                   "'" + f.thing + "' leaves '" + f.src.str() +
                                       "' but never arrives there or is created there",
                                   span));
      }
    }
  }

  for (const auto& t : model.triggers) {
    const std::string key = "trigger:" + t.id;
    const auto span = model.span_of(key);
    if (!ids.insert(key).second) {
      diags.push_back(
          make_error(codes::kDuplicateId, t.id, "duplicate trigger id '" + t.id + "'", span));
    }
    bool endpoints_ok = true;
    for (const StageRef* s : {&t.src, &t.dst}) {
      if (!resolves(*s) || !env_ok(*s)) {
        diags.push_back(
            make_error(codes::kUnresolvedPath, t.id, "unresolved stage '" + s->str() + "'", span));
        endpoints_ok = false;
      }
    }
    if (!endpoints_ok) continue;
    if (t.dst.kind != StageKind::Create && t.dst.kind != StageKind::Process) {
      diags.push_back(make_error(codes::kIllegalFlowPair, t.id,
                                 "trigger target '" + t.dst.str() + "' must be create or process",
                                 span));
    }
    const auto src_things = things_at(model, t.src);
    const auto dst_things = things_at(model, t.dst);
    for (const auto& th : src_things) {
      if (std::find(dst_things.begin(), dst_things.end(), th) != dst_things.end()) {
        diags.push_back(make_warning(codes::kSameThingTrigger, t.id,
                                     "trigger '" + t.str() + "' links flows of the same thing '" +
                                         th + "'",
                                     span));
        break;
      }
    }
  }

  const auto stages = used_stages(model);
  for (std::size_t i = 0; i < model.machines.size(); ++i) {
    const MachinePath path = model.path_of(i);
    const bool touched = std::any_of(stages.begin(), stages.end(), [&](const StageRef& s) {
      return !s.is_env() && within(s.machine_path, path);
    });
    if (!touched) {
      diags.push_back(make_warning(codes::kIsolatedMachine, model.machines[i].id,
                                   "machine '" + model.machines[i].id + "' has no incident edges",
                                   model.span_of("machine:" + model.machines[i].id)));
    }
  }
  return diags;
}

Result<Resolved> resolve(const Model& model, std::string_view text) {
  Result<Resolved> result;
  MachinePath segments;
  std::string current;
  for (char c : text) {
    if (c == '.') {
      segments.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  segments.push_back(current);

  std::optional<StageKind> kind;
  if (segments.size() >= 2) kind = parse_stage_kind(segments.back());
  if (kind) {
    segments.pop_back();
    StagePath p{segments, *kind, std::nullopt};
    if (auto s = resolve_stage(model, p, std::string(text), result.diagnostics)) result.value = *s;
    return result;
  }

  MachinePath prefix;
  for (const auto& seg : segments) {
    prefix.push_back(seg);
    if (!model.find_machine(prefix)) {
      result.diagnostics.push_back(make_error(
          codes::kUnresolvedPath, std::string(text),
          "unknown path segment '" + seg + "' in '" + std::string(text) + "'"));
      return result;
    }
  }
  result.value = MachineRef{*model.machine_index(prefix)};
  return result;
}

}  // namespace thinging
