#include "thinging/events.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace thinging {

namespace {

std::optional<StageRef> lookup_stage(const Model& model, const StagePath& p) {
  StageRef ref{p.segments, p.kind};
  if (ref.is_env()) {
    if (ref.kind != StageKind::Transfer) return std::nullopt;
    return ref;
  }
  if (!model.find_machine(p.segments)) return std::nullopt;
  return ref;
}

std::string path_text(const StagePath& p) {
  return join_path(p.segments) + "." + std::string(to_string(p.kind));
}

std::size_t node_index(const Chronology& c, const std::string& name) {
  // Event names often share a prefix (E1, E2, ...), so the last character
  // rejects most mismatches before a full comparison.
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const std::string& e = c.nodes[i].event;
    if (e.size() == name.size() && (e.empty() || e.back() == name.back()) && e == name) return i;
  }
  return c.nodes.size();
}

}  // namespace

Result<Model> attach_event(const Model& model, const EventDecl& decl) {
  Result<Model> result;
  auto& diags = result.diagnostics;
  const std::string element = decl.name;

  if (model.find_event(decl.name)) {
    diags.push_back(make_error(codes::kUnknownEvent, element,
                               "duplicate event '" + decl.name + "'", decl.span));
  }

  Event event{decl.name, decl.name, {}, {}, {}, decl.perpetual};

  for (const auto& node : decl.nodes) {
    auto ref = lookup_stage(model, node);
    if (!ref || !stage_in_use(model, *ref)) {
      diags.push_back(make_error(codes::kRegionNotSubgraph, element,
                                 "event '" + decl.name + "' names stage '" + path_text(node) +
                                     "' which is not part of the model",
                                 node.span ? node.span : decl.span));
      continue;
    }
    event.nodes.push_back(*ref);
  }

  for (const auto& flow : decl.flows) {
    auto src = lookup_stage(model, flow.src);
    auto dst = lookup_stage(model, flow.dst);
    const FlowEdge* match = nullptr;
    if (src && dst) {
      for (const auto& f : model.flows) {
        if (f.thing == flow.thing && f.src == *src && f.dst == *dst) {
          match = &f;
          break;
        }
      }
    }
    if (!match) {
      diags.push_back(make_error(codes::kRegionNotSubgraph, element,
                                 "event '" + decl.name + "' names flow '" + flow.thing + " " +
                                     path_text(flow.src) + " -> " + path_text(flow.dst) +
                                     "' which is not part of the model",
                                 flow.span ? flow.span : decl.span));
      continue;
    }
    event.flows.push_back(match->id);
  }

  for (const auto& trig : decl.triggers) {
    auto src = lookup_stage(model, trig.src);
    auto dst = lookup_stage(model, trig.dst);
    const TriggerEdge* match = nullptr;
    if (src && dst) {
      for (const auto& t : model.triggers) {
        if (t.src == *src && t.dst == *dst) {
          match = &t;
          break;
        }
      }
    }
    if (!match) {
      diags.push_back(make_error(codes::kRegionNotSubgraph, element,
                                 "event '" + decl.name + "' names trigger '" +
                                     path_text(trig.src) + " ~> " + path_text(trig.dst) +
                                     "' which is not part of the model",
                                 trig.span ? trig.span : decl.span));
      continue;
    }
    event.triggers.push_back(match->id);
  }

  if (decl.nodes.empty() && decl.flows.empty() && decl.triggers.empty()) {
    diags.push_back(make_error(codes::kRegionNotSubgraph, element,
                               "event '" + decl.name + "' has an empty region", decl.span));
  }

  if (has_errors(diags)) return result;

  Model out = model;
  out.events.push_back(std::move(event));
  if (decl.span) out.spans["event:" + decl.name] = *decl.span;
  if (out.chronology) out.chronology->nodes.push_back({decl.name, decl.perpetual});
  result.value = std::move(out);
  return result;
}

Model with_chronology(const Model& model, const ChronologyDecl& decl) {
  Model out = model;
  Chronology chronology;
  for (const auto& e : model.events) chronology.nodes.push_back({e.name, e.perpetual});
  for (std::size_t i = 0; i < decl.edges.size(); ++i) {
    const auto& edge = decl.edges[i];
    chronology.edges.emplace_back(edge.before, edge.after);
    if (edge.span) out.spans["precedence:" + std::to_string(i)] = *edge.span;
  }
  if (decl.span) out.spans["chronology"] = *decl.span;
  out.chronology = std::move(chronology);
  return out;
}

Diagnostics validate_chronology(const Model& model) {
  Diagnostics diags;
  if (!model.chronology) return diags;
  const Chronology& c = *model.chronology;

  for (std::size_t i = 0; i < c.edges.size(); ++i) {
    for (const std::string* name : {&c.edges[i].first, &c.edges[i].second}) {
      if (node_index(c, *name) == c.nodes.size()) {
        diags.push_back(make_error(codes::kUnknownEvent, *name,
                                   "chronology refers to undeclared event '" + *name + "'",
                                   model.span_of("precedence:" + std::to_string(i))));
      }
    }
  }

  // Tarjan's SCC over the known nodes.
  const std::size_t n = c.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : c.edges) {
    const auto ia = node_index(c, a);
    const auto ib = node_index(c, b);
    if (ia < n && ib < n) adj[ia].push_back(ib);
  }
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  int counter = 0;
  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : adj[v]) {
      if (index[w] < 0) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      components.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) connect(v);
  }

  // Report components in node declaration order of their first member.
  std::vector<std::vector<std::size_t>> cyclic;
  for (auto& comp : components) {
    std::sort(comp.begin(), comp.end());
    const bool self_loop =
        comp.size() == 1 &&
        std::find(adj[comp[0]].begin(), adj[comp[0]].end(), comp[0]) != adj[comp[0]].end();
    if (comp.size() > 1 || self_loop) cyclic.push_back(comp);
  }
  std::sort(cyclic.begin(), cyclic.end());

  for (const auto& comp : cyclic) {
    const std::set<std::size_t> members(comp.begin(), comp.end());
    const std::size_t start = comp.front();
    // Depth-first search inside the component for a path back to start.
    std::vector<std::size_t> path{start};
    std::set<std::size_t> visited{start};
    std::function<bool(std::size_t)> walk = [&](std::size_t v) {
      for (std::size_t w : adj[v]) {
        if (!members.count(w)) continue;
        if (w == start) return true;
        if (visited.insert(w).second) {
          path.push_back(w);
          if (walk(w)) return true;
          path.pop_back();
        }
      }
      return false;
    };
    walk(start);
    std::string text;
    for (std::size_t v : path) text += c.nodes[v].event + " -> ";
    text += c.nodes[start].event;
    diags.push_back(make_error(codes::kChronologyCycle, c.nodes[start].event,
                               "chronology cycle: " + text, model.span_of("chronology")));
  }
  return diags;
}

std::optional<std::vector<std::string>> topological_order(const Chronology& c) {
  const std::size_t n = c.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : c.edges) {
    const auto ia = node_index(c, a);
    const auto ib = node_index(c, b);
    if (ia == n || ib == n) return std::nullopt;
    adj[ia].push_back(ib);
    ++indegree[ib];
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(c.nodes[v].event);
    for (std::size_t w : adj[v]) {
      if (--indegree[w] == 0) ready.insert(w);
    }
  }
  if (order.size() != n) return std::nullopt;
  return order;
}

std::vector<std::string> predecessors(const Chronology& c, const std::string& event) {
  std::vector<std::string> out;
  for (const auto& [a, b] : c.edges) {
    if (b == event && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

bool is_linear_extension(const Chronology& c, std::span<const std::string> sequence) {
  if (sequence.size() != c.nodes.size()) {
    throw std::invalid_argument("sequence length " + std::to_string(sequence.size()) +
                                " does not match chronology size " +
                                std::to_string(c.nodes.size()));
  }
  const std::size_t n = c.nodes.size();
  constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);
  // Small chronologies avoid a heap allocation; this runs in tight loops.
  std::array<std::size_t, 32> small;
  std::vector<std::size_t> large;
  std::size_t* position = small.data();
  if (n > small.size()) {
    large.resize(n);
    position = large.data();
  }
  std::fill(position, position + n, kUnseen);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const std::size_t node = node_index(c, sequence[i]);
    if (node == n) throw std::invalid_argument("'" + sequence[i] + "' is not a chronology node");
    if (position[node] != kUnseen) {
      throw std::invalid_argument("'" + sequence[i] + "' appears twice in the sequence");
    }
    position[node] = i;
  }
  for (const auto& [a, b] : c.edges) {
    const std::size_t ia = node_index(c, a);
    const std::size_t ib = node_index(c, b);
    if (ia == n || ib == n) throw std::invalid_argument("chronology edge refers to an unknown event");
    if (position[ia] >= position[ib]) return false;
  }
  return true;
}

CoverageReport coverage(const Model& model) {
  std::set<std::string> in_region;
  for (const auto& e : model.events) {
    in_region.insert(e.flows.begin(), e.flows.end());
    in_region.insert(e.triggers.begin(), e.triggers.end());
  }
  CoverageReport report;
  auto sort_edge = [&](const std::string& id) {
    (in_region.count(id) ? report.covered : report.uncovered).push_back(id);
  };
  for (const auto& f : model.flows) sort_edge(f.id);
  for (const auto& t : model.triggers) sort_edge(t.id);
  const std::size_t total = model.flows.size() + model.triggers.size();
  report.ratio = total == 0 ? 1.0
                            : static_cast<double>(report.covered.size()) /
                                  static_cast<double>(total);
  return report;
}

std::string format_coverage(const CoverageReport& report) {
  auto join = [](const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += " " + id;
    return out;
  };
  std::ostringstream os;
  os << "covered:" << join(report.covered) << '\n';
  os << "uncovered:" << join(report.uncovered) << '\n';
  os.setf(std::ios::fixed);
  os.precision(6);
  os << "ratio: " << report.ratio << '\n';
  return os.str();
}

std::string coverage_json(const CoverageReport& report) {
  nlohmann::ordered_json j;
  j["covered"] = report.covered;
  j["uncovered"] = report.uncovered;
  j["ratio"] = report.ratio;
  return j.dump(2) + "\n";
}

}  // namespace thinging
