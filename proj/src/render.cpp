#include "thinging/render.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "thinging/diagnostic.hpp"
#include "thinging/events.hpp"

namespace thinging {

namespace {

constexpr std::array<std::string_view, 8> kPalette{
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999"};

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string indent(int depth) { return std::string(static_cast<std::size_t>(depth) * 2, ' '); }

class StaticWriter {
 public:
  explicit StaticWriter(const Model& model) : model_(model) {
    for (const auto& s : used_stages(model)) used_.insert(s);
  }

  void body(std::string& out) const {
    for (std::size_t i = 0; i < model_.roots.size(); ++i) cluster(out, model_.roots[i], 1);
    if (used_.count(env_transfer())) {
      out += indent(1) + quote(env_transfer().str()) + " [label=\"env\", shape=plaintext];\n";
    }
    for (const auto& f : model_.flows) {
      out += indent(1) + quote(f.src.str()) + " -> " + quote(f.dst.str()) + " [id=" + quote(f.id) +
             ", label=" + quote(f.thing) + "];\n";
    }
    for (const auto& t : model_.triggers) {
      out += indent(1) + quote(t.src.str()) + " -> " + quote(t.dst.str()) + " [id=" + quote(t.id) +
             ", style=dashed];\n";
    }
  }

 private:
  void cluster(std::string& out, std::size_t index, int depth) const {
    const Machine& m = model_.machines[index];
    const MachinePath path = model_.path_of(index);
    out += indent(depth) + "subgraph " + quote("cluster_" + join_path(path)) + " {\n";
    out += indent(depth + 1) + "label=" + quote(m.name) + ";\n";
    for (StageKind kind : kAllStageKinds) {
      const StageRef ref{path, kind};
      if (!used_.count(ref)) continue;
      out += indent(depth + 1) + quote(ref.str()) + " [label=" + quote(to_string(kind)) + "];\n";
    }
    for (std::size_t child : m.children) cluster(out, child, depth + 1);
    out += indent(depth) + "}\n";
  }

  const Model& model_;
  std::set<StageRef> used_;
};

std::string header(const std::string& name) {
  return "digraph " + quote(name) + " {\n" + indent(1) + "compound=true;\n" + indent(1) +
         "node [shape=box, style=rounded];\n";
}

}  // namespace

std::string render_static(const Model& model) {
  std::string out = header(model.name);
  StaticWriter(model).body(out);
  out += "}\n";
  return out;
}

std::string render_events(const Model& model) {
  if (model.events.empty()) throw Error("render", "model '" + model.name + "' has no events");
  std::string out = header(model.name);
  StaticWriter(model).body(out);
  for (std::size_t e = 0; e < model.events.size(); ++e) {
    const Event& ev = model.events[e];
    const std::string color(kPalette[e % kPalette.size()]);
    std::vector<std::string> nodes;
    std::vector<std::string> edges;
    auto add = [&](const StageRef& s) {
      const std::string id = s.str();
      if (std::find(nodes.begin(), nodes.end(), id) == nodes.end()) nodes.push_back(id);
    };
    for (const auto& n : ev.nodes) add(n);
    for (const auto& id : ev.flows) {
      if (const auto* f = model.find_flow(id)) {
        add(f->src);
        add(f->dst);
        edges.push_back(id);
      }
    }
    for (const auto& id : ev.triggers) {
      if (const auto* t = model.find_trigger(id)) {
        add(t->src);
        add(t->dst);
        edges.push_back(id);
      }
    }
    std::string edge_list;
    for (const auto& id : edges) edge_list += (edge_list.empty() ? "" : " ") + id;
    out += indent(1) + "subgraph " + quote("event_" + ev.name) + " {\n";
    out += indent(2) + "label=" + quote(ev.perpetual ? ev.name + " (perpetual)" : ev.name) + ";\n";
    out += indent(2) + "comment=" + quote(edge_list) + ";\n";
    for (const auto& id : nodes) {
      out += indent(2) + quote(id) + " [color=" + quote(color) + ", penwidth=2" +
             (ev.perpetual ? ", peripheries=2" : "") + "];\n";
    }
    out += indent(1) + "}\n";
  }
  out += indent(1) + "subgraph \"cluster_legend\" {\n";
  out += indent(2) + "label=\"events\";\n";
  for (std::size_t e = 0; e < model.events.size(); ++e) {
    const Event& ev = model.events[e];
    out += indent(2) + quote("legend_" + ev.name) + " [label=" +
           quote(ev.perpetual ? ev.name + " (perpetual)" : ev.name) + ", color=" +
           quote(kPalette[e % kPalette.size()]) + ", penwidth=2" +
           (ev.perpetual ? ", peripheries=2" : "") + "];\n";
  }
  out += indent(1) + "}\n";
  out += "}\n";
  return out;
}

std::string render_chronology(const Model& model) {
  if (!model.chronology) throw Error("render", "model '" + model.name + "' has no chronology");
  const Chronology& c = *model.chronology;
  if (!topological_order(c)) {
    throw Error(std::string(codes::kChronologyCycle), "chronology of '" + model.name + "' is cyclic");
  }
  std::string out = "digraph " + quote(model.name + " chronology") + " {\n";
  out += indent(1) + "rankdir=LR;\n";
  out += indent(1) + "node [shape=box];\n";
  for (const auto& n : c.nodes) {
    out += indent(1) + quote(n.event) + (n.perpetual ? " [peripheries=2]" : "") + ";\n";
  }
  for (const auto& [a, b] : c.edges) out += indent(1) + quote(a) + " -> " + quote(b) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace thinging
