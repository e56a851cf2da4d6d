// Helpers shared by the test binaries. Everything here is written against the
// public types only, independent of the library's own comparisons.
#pragma once

#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinging/dsl.hpp"
#include "thinging/model.hpp"

namespace support {

inline std::string source_path(const std::string& rel) { return std::string(TM_SOURCE_DIR) + "/" + rel; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline thinging::Model load_corpus_model(const std::string& name) {
  const std::string rel = "corpus/" + name + ".tm";
  auto r = thinging::parse(read_text(source_path(rel)), {rel});
  if (!r.model) throw std::runtime_error(rel + " does not parse");
  return *r.model;
}

inline std::string stage_text(const thinging::StageRef& s) {
  std::string out;
  for (const auto& seg : s.machine_path) out += seg + ".";
  const char* kinds[] = {"create", "process", "release", "transfer", "receive"};
  return out + kinds[static_cast<int>(s.kind)];
}

// Field-by-field comparison ignoring source spans. Returns "" when equal,
// otherwise a description of the first difference.
inline std::string structural_diff(const thinging::Model& a, const thinging::Model& b) {
  if (a.name != b.name) return "name";
  if (a.things.size() != b.things.size()) return "thing count";
  for (std::size_t i = 0; i < a.things.size(); ++i) {
    if (a.things[i].id != b.things[i].id || a.things[i].name != b.things[i].name ||
        a.things[i].as_machine != b.things[i].as_machine) {
      return "thing " + a.things[i].id;
    }
  }
  if (a.machines.size() != b.machines.size()) return "machine count";
  for (std::size_t i = 0; i < a.machines.size(); ++i) {
    const auto& x = a.machines[i];
    const auto& y = b.machines[i];
    if (x.id != y.id || x.name != y.name || x.parent != y.parent || x.children != y.children) {
      return "machine " + x.id;
    }
  }
  if (a.roots != b.roots) return "roots";
  if (a.flows.size() != b.flows.size()) return "flow count";
  for (std::size_t i = 0; i < a.flows.size(); ++i) {
    const auto& x = a.flows[i];
    const auto& y = b.flows[i];
    if (x.id != y.id || x.thing != y.thing || stage_text(x.src) != stage_text(y.src) ||
        stage_text(x.dst) != stage_text(y.dst)) {
      return "flow " + x.id;
    }
  }
  if (a.triggers.size() != b.triggers.size()) return "trigger count";
  for (std::size_t i = 0; i < a.triggers.size(); ++i) {
    const auto& x = a.triggers[i];
    const auto& y = b.triggers[i];
    if (x.id != y.id || stage_text(x.src) != stage_text(y.src) ||
        stage_text(x.dst) != stage_text(y.dst)) {
      return "trigger " + x.id;
    }
  }
  if (a.events.size() != b.events.size()) return "event count";
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const auto& x = a.events[i];
    const auto& y = b.events[i];
    if (x.name != y.name || x.perpetual != y.perpetual || x.flows != y.flows ||
        x.triggers != y.triggers || x.nodes.size() != y.nodes.size()) {
      return "event " + x.name;
    }
    for (std::size_t n = 0; n < x.nodes.size(); ++n) {
      if (stage_text(x.nodes[n]) != stage_text(y.nodes[n])) return "event node " + x.name;
    }
  }
  if (a.chronology.has_value() != b.chronology.has_value()) return "chronology presence";
  if (a.chronology) {
    const auto& x = *a.chronology;
    const auto& y = *b.chronology;
    if (x.edges != y.edges) return "chronology edges";
    if (x.nodes.size() != y.nodes.size()) return "chronology nodes";
    for (std::size_t i = 0; i < x.nodes.size(); ++i) {
      if (x.nodes[i].event != y.nodes[i].event || x.nodes[i].perpetual != y.nodes[i].perpetual) {
        return "chronology node " + x.nodes[i].event;
      }
    }
  }
  return "";
}

// ---------------------------------------------------------------------------
// DOT well-formedness scanner.

struct DotScan {
  bool ok = true;
  std::string error;
  std::string graph_name;
  int clusters = 0;
  int subgraphs = 0;
  std::vector<std::string> node_statements;             // ids, in order
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::map<std::string, std::string>> edge_attrs;
  // Node statements seen inside each subgraph, including nested ones.
  std::map<std::string, std::set<std::string>> members;
};

inline DotScan scan_dot(const std::string& text) {
  DotScan scan;
  struct Tok {
    std::string text;
    bool quoted;
  };
  std::vector<Tok> toks;
  auto fail = [&](const std::string& why) {
    if (scan.ok) {
      scan.ok = false;
      scan.error = why;
    }
  };
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '\\' && i + 1 < text.size()) {
          s += text[i + 1];
          i += 2;
        } else if (text[i] == '"') {
          closed = true;
          ++i;
          break;
        } else {
          s += text[i++];
        }
      }
      if (!closed) fail("unterminated string");
      toks.push_back({s, true});
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      toks.push_back({"->", false});
      i += 2;
    } else if (std::string("{}[];=,").find(c) != std::string::npos) {
      toks.push_back({std::string(1, c), false});
      ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '#') {
      std::string s;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_' || text[i] == '.' || text[i] == '#')) {
        s += text[i++];
      }
      toks.push_back({s, false});
    } else {
      fail(std::string("stray character '") + c + "'");
      ++i;
    }
  }
  std::size_t p = 0;
  auto at = [&](const char* s) { return p < toks.size() && !toks[p].quoted && toks[p].text == s; };
  auto is_id = [&] {
    return p < toks.size() &&
           (toks[p].quoted || (toks[p].text.size() && std::string("{}[];=,->").find(toks[p].text[0]) ==
                                                          std::string::npos));
  };
  auto attrs = [&]() {
    std::map<std::string, std::string> out;
    if (!at("[")) return out;
    ++p;
    while (p < toks.size() && !at("]")) {
      if (!is_id()) {
        fail("bad attribute name");
        return out;
      }
      std::string key = toks[p++].text;
      if (!at("=")) {
        fail("attribute without value");
        return out;
      }
      ++p;
      if (!is_id()) {
        fail("bad attribute value");
        return out;
      }
      out[key] = toks[p++].text;
      if (at(",")) ++p;
    }
    if (!at("]")) fail("unclosed attribute list");
    ++p;
    return out;
  };
  if (!(p < toks.size() && toks[p].text == "digraph" && !toks[p].quoted)) fail("missing digraph");
  ++p;
  if (!is_id()) fail("missing graph name");
  if (p < toks.size()) scan.graph_name = toks[p].text;
  ++p;
  if (!at("{")) fail("missing opening brace");
  ++p;
  std::vector<std::string> stack{""};
  while (scan.ok && p < toks.size() && !stack.empty()) {
    if (at("}")) {
      stack.pop_back();
      ++p;
      continue;
    }
    if (!toks[p].quoted && toks[p].text == "subgraph") {
      ++p;
      if (!is_id()) {
        fail("subgraph without name");
        break;
      }
      const std::string name = toks[p++].text;
      if (!at("{")) {
        fail("subgraph without body");
        break;
      }
      ++p;
      ++scan.subgraphs;
      if (name.rfind("cluster", 0) == 0) ++scan.clusters;
      stack.push_back(name);
      continue;
    }
    if (!toks[p].quoted && (toks[p].text == "node" || toks[p].text == "edge" || toks[p].text == "graph")) {
      ++p;
      attrs();
      if (!at(";")) fail("unterminated default statement");
      ++p;
      continue;
    }
    if (!is_id()) {
      fail("unexpected token '" + toks[p].text + "'");
      break;
    }
    const std::string first = toks[p++].text;
    if (at("=")) {
      ++p;
      if (!is_id()) fail("bad graph attribute");
      ++p;
    } else if (at("->")) {
      ++p;
      if (!is_id()) {
        fail("edge without target");
        break;
      }
      const std::string second = toks[p++].text;
      scan.edges.emplace_back(first, second);
      scan.edge_attrs.push_back(attrs());
    } else {
      attrs();
      scan.node_statements.push_back(first);
      for (const auto& sg : stack) {
        if (!sg.empty()) scan.members[sg].insert(first);
      }
    }
    if (!at(";")) {
      fail("unterminated statement after '" + first + "'");
      break;
    }
    ++p;
  }
  if (scan.ok && !stack.empty()) fail("unbalanced braces");
  if (scan.ok && p != toks.size()) fail("trailing tokens");
  return scan;
}

// ---------------------------------------------------------------------------
// Brute-force counts straight from the model.

struct ModelCounts {
  std::size_t stage_nodes = 0;  // distinct edge endpoints
  std::size_t machines = 0;
  std::size_t flows = 0;
  std::size_t triggers = 0;
};

inline ModelCounts count_model(const thinging::Model& m) {
  std::set<std::string> stages;
  for (const auto& f : m.flows) {
    stages.insert(stage_text(f.src));
    stages.insert(stage_text(f.dst));
  }
  for (const auto& t : m.triggers) {
    stages.insert(stage_text(t.src));
    stages.insert(stage_text(t.dst));
  }
  for (const auto& e : m.events) {
    for (const auto& n : e.nodes) stages.insert(stage_text(n));
  }
  return {stages.size(), m.machines.size(), m.flows.size(), m.triggers.size()};
}

// ---------------------------------------------------------------------------
// Random valid models, emitted as text with random layout noise.

class ModelGenerator {
 public:
  explicit ModelGenerator(unsigned seed) : rng_(seed) {}

  std::string next() {
    lines_.clear();
    machines_.clear();
    const int n_things = pick(1, 4);
    const int n_roots = pick(1, 4);
    std::vector<std::string> decls;
    decls.push_back("model m" + std::to_string(pick(0, 999)));
    for (int i = 0; i < n_things; ++i) decls.push_back("thing th" + std::to_string(i));
    for (int i = 0; i < n_roots; ++i) decls.push_back(machine_decl({"m" + std::to_string(i)}, 0));

    // Each thing walks a legal route: create, release, transfer, then hops
    // across transfer stages, landing on receive and process.
    std::vector<std::string> flows;
    std::set<std::string> flow_keys;
    std::vector<std::pair<std::string, std::string>> stage_things;  // stage, thing
    auto add_flow = [&](const std::string& thing, const std::string& a, const std::string& b) {
      if (!flow_keys.insert(thing + a + b).second) return;
      flows.push_back("flow " + thing + " " + a + " -> " + b);
      stage_things.emplace_back(a, thing);
      stage_things.emplace_back(b, thing);
    };
    for (int t = 0; t < n_things; ++t) {
      const std::string thing = "th" + std::to_string(t);
      std::string m = any_machine();
      if (coin()) {
        add_flow(thing, m + ".create", m + ".process");
        add_flow(thing, m + ".process", m + ".release");
      } else {
        add_flow(thing, m + ".create", m + ".release");
      }
      add_flow(thing, m + ".release", m + ".transfer");
      const int hops = pick(0, 3);
      for (int h = 0; h < hops; ++h) {
        std::string next = any_machine();
        if (next == m) break;
        add_flow(thing, m + ".transfer", next + ".transfer");
        m = next;
      }
      if (coin()) add_flow(thing, m + ".transfer", "env.transfer");
      if (coin()) {
        add_flow(thing, m + ".transfer", m + ".receive");
        add_flow(thing, m + ".receive", m + ".process");
      }
    }
    // Triggers between stages carrying different things.
    std::vector<std::string> triggers;
    std::set<std::string> trigger_keys;
    for (int i = 0, n = pick(0, 3); i < n && stage_things.size() > 1; ++i) {
      const auto& src = stage_things[static_cast<std::size_t>(pick(0, static_cast<int>(stage_things.size()) - 1))];
      const std::string dm = any_machine();
      if (src.first.rfind("env.", 0) == 0) continue;
      const std::string dst = dm + (coin() ? ".create" : ".process");
      bool clash = false;
      for (const auto& [stage, thing] : stage_things) {
        if (stage == dst) {
          for (const auto& [s2, t2] : stage_things) {
            if (s2 == src.first && t2 == thing) clash = true;
          }
        }
      }
      if (clash || !trigger_keys.insert(src.first + dst).second) continue;
      triggers.push_back("trigger " + src.first + " ~> " + dst);
      stage_things.emplace_back(dst, "");
    }
    for (auto& f : flows) decls.push_back(f);
    for (auto& t : triggers) decls.push_back(t);

    // Events over random subsets, chronology edges forward only.
    const int n_events = pick(0, 4);
    for (int e = 0; e < n_events; ++e) {
      std::string ev = "event ev" + std::to_string(e) + (coin() ? " perpetual" : "") + " {";
      bool any = false;
      for (const auto& f : flows) {
        if (pick(0, 2) == 0) {
          ev += "\n  " + f;
          any = true;
        }
      }
      for (const auto& t : triggers) {
        if (coin()) {
          ev += "\n  " + t;
          any = true;
        }
      }
      if (!any || coin()) {
        const auto& st = stage_things[static_cast<std::size_t>(pick(0, static_cast<int>(stage_things.size()) - 1))];
        ev += "\n  node " + st.first;
      }
      decls.push_back(ev + "\n}");
    }
    if (n_events > 1 && coin()) {
      std::string c = "chronology {";
      for (int a = 0; a < n_events; ++a) {
        for (int b = a + 1; b < n_events; ++b) {
          if (coin()) c += "\n  ev" + std::to_string(a) + " -> ev" + std::to_string(b);
        }
      }
      decls.push_back(c + "\n}");
    }

    std::string text;
    for (const auto& d : decls) {
      if (pick(0, 4) == 0) text += "# noise\n";
      std::string line = d;
      if (coin()) line = std::string(static_cast<std::size_t>(pick(1, 4)), ' ') + line;
      if (pick(0, 3) == 0) line += "   # trailing";
      text += line + "\n";
      if (pick(0, 5) == 0) text += "\n";
    }
    return text;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return pick(0, 1) == 1; }

  std::string machine_decl(const std::vector<std::string>& path, int depth) {
    std::string dotted;
    for (const auto& s : path) dotted += (dotted.empty() ? "" : ".") + s;
    machines_.push_back(dotted);
    std::string out = "machine " + path.back();
    const int kids = depth < 2 ? pick(0, 2) : 0;
    if (kids == 0) return out;
    out += " {";
    for (int k = 0; k < kids; ++k) {
      auto child = path;
      child.push_back("s" + std::to_string(k));
      out += "\n  " + machine_decl(child, depth + 1);
    }
    return out + "\n}";
  }

  std::string any_machine() {
    return machines_[static_cast<std::size_t>(pick(0, static_cast<int>(machines_.size()) - 1))];
  }

  std::mt19937 rng_;
  std::vector<std::string> lines_;
  std::vector<std::string> machines_;
};

}  // namespace support
