#include "thinging/sim.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "thinging/core.hpp"
#include "thinging/events.hpp"

namespace thinging {

namespace {

inline const std::string kScenarioError = "scenario";

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> words;
  std::string current;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::optional<long> parse_long(std::string_view text) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

TraceKind arrival_kind(StageKind kind) {
  switch (kind) {
    case StageKind::Create: return TraceKind::Create;
    case StageKind::Process: return TraceKind::Process;
    case StageKind::Release: return TraceKind::Release;
    case StageKind::Transfer: return TraceKind::Transfer;
    case StageKind::Receive: return TraceKind::Receive;
  }
  return TraceKind::Move;
}

std::string token_name(long id) { return "tok" + std::to_string(id); }

std::optional<StageRef> parse_stage(const Model& model, std::string_view text) {
  auto r = resolve(model, text);
  if (!r.ok()) return std::nullopt;
  if (const auto* s = std::get_if<StageRef>(&*r.value)) return *s;
  return std::nullopt;
}

// A branch id names the chosen flow's destination: its full stage path,
// its machine path, or the machine's own name.
bool branch_matches(const StageRef& dst, const std::string& branch) {
  return dst.str() == branch || join_path(dst.machine_path) == branch ||
         dst.machine_path.back() == branch;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view file) {
  Scenario scenario;
  scenario.max_steps = kDefaultMaxSteps;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(kScenarioError, std::string(file) + ":" + std::to_string(number) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto words = split_words(line);
    if (words.empty()) continue;
    const std::string& verb = words[0];
    if (verb == "inject") {
      if (words.size() != 4 || words[3].size() < 2 || words[3][0] != '@') {
        fail("expected 'inject <thing> <stageref> @<step>'");
      }
      auto step = parse_long(std::string_view(words[3]).substr(1));
      if (!step || *step < 0) fail("bad injection step '" + words[3] + "'");
      scenario.injections.push_back({words[1], words[2], *step});
    } else if (verb == "choose") {
      if (words.size() != 3) fail("expected 'choose <decision-point> <branch>'");
      scenario.choices[words[1]].push_back(words[2]);
    } else if (verb == "gate") {
      if (words.size() != 3 || (words[2] != "true" && words[2] != "false")) {
        fail("expected 'gate <gate> true|false'");
      }
      if (!scenario.gates.emplace(words[1], words[2] == "true").second) {
        fail("gate '" + words[1] + "' set twice");
      }
    } else if (verb == "max_steps") {
      if (words.size() != 2) fail("expected 'max_steps <n>'");
      auto n = parse_long(words[1]);
      if (!n || *n < 1) fail("max_steps must be a positive integer");
      scenario.max_steps = *n;
    } else {
      fail("unknown directive '" + verb + "'");
    }
  }
  return scenario;
}

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::Create: return "create";
    case TraceKind::Move: return "move";
    case TraceKind::Process: return "process";
    case TraceKind::Release: return "release";
    case TraceKind::Transfer: return "transfer";
    case TraceKind::Receive: return "receive";
    case TraceKind::Trigger: return "trigger";
    case TraceKind::EventStart: return "event_start";
    case TraceKind::EventEnd: return "event_end";
    case TraceKind::Choice: return "choice";
    case TraceKind::Gate: return "gate";
  }
  return "?";
}

std::optional<TraceKind> parse_trace_kind(std::string_view word) {
  for (int k = 0; k <= static_cast<int>(TraceKind::Gate); ++k) {
    if (to_string(static_cast<TraceKind>(k)) == word) return static_cast<TraceKind>(k);
  }
  return std::nullopt;
}

std::string_view to_string(Termination t) {
  return t == Termination::Quiescent ? "quiescent" : "step_limit";
}

std::string write_trace(const Trace& trace) {
  std::string out;
  for (const auto& e : trace.entries) {
    out += std::to_string(e.step);
    out += '\t';
    out += to_string(e.kind);
    out += '\t';
    out += e.subject;
    out += '\t';
    out += e.detail;
    out += '\n';
  }
  out += "terminated=";
  out += to_string(trace.terminated);
  out += '\n';
  return out;
}

Trace read_trace(std::string_view text) {
  Trace trace;
  std::istringstream in{std::string(text)};
  std::string line;
  bool terminated_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("terminated=", 0) == 0) {
      const std::string reason = line.substr(11);
      if (reason == "quiescent") {
        trace.terminated = Termination::Quiescent;
      } else if (reason == "step_limit") {
        trace.terminated = Termination::StepLimit;
      } else {
        throw Error(kScenarioError, "unknown termination '" + reason + "'");
      }
      terminated_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos) throw Error(kScenarioError, "malformed trace line: " + line);
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    fields.push_back(line.substr(start));
    auto step = parse_long(fields[0]);
    auto kind = parse_trace_kind(fields[1]);
    if (!step || !kind) throw Error(kScenarioError, "malformed trace line: " + line);
    trace.entries.push_back({*step, *kind, fields[2], fields[3]});
    if (*kind == TraceKind::EventStart) trace.fired_events.push_back(fields[2]);
  }
  if (!terminated_seen) throw Error(kScenarioError, "trace lacks a terminated= line");
  return trace;
}


Simulator::Simulator(Model model, Scenario scenario)
    : model_(std::move(model)), scenario_(std::move(scenario)) {
  auto invalid = [](const std::string& msg) { throw Error(kScenarioError, msg); };
  if (scenario_.max_steps < 1) invalid("max_steps must be at least 1");

  for (std::size_t i = 0; i < model_.flows.size(); ++i) {
    const FlowEdge& f = model_.flows[i];
    out_flows_[f.src].push_back(i);
    if (f.src.kind == StageKind::Create) {
      auto& things = created_things_[f.src];
      if (std::find(things.begin(), things.end(), f.thing) == things.end()) {
        things.push_back(f.thing);
      }
    }
  }
  for (std::size_t i = 0; i < model_.triggers.size(); ++i) {
    triggers_from_[model_.triggers[i].src].push_back(i);
  }

  // Decision points: stages with two or more outgoing flows of one thing.
  std::set<std::string> dp_set;
  for (const auto& [stage, flows] : out_flows_) {
    std::map<std::string, int> per_thing;
    for (auto f : flows) {
      if (++per_thing[model_.flows[f].thing] == 2) dp_set.insert(stage.str());
    }
  }
  for (const auto& s : used_stages(model_)) {
    if (dp_set.count(s.str())) decision_points_.push_back(s.str());
  }

  flow_events_.assign(model_.flows.size(), {});
  trigger_events_.assign(model_.triggers.size(), {});
  event_predecessors_.assign(model_.events.size(), {});
  auto add_unique = [](std::vector<std::size_t>& v, std::size_t e) {
    if (std::find(v.begin(), v.end(), e) == v.end()) v.push_back(e);
  };
  for (std::size_t e = 0; e < model_.events.size(); ++e) {
    const Event& ev = model_.events[e];
    for (const auto& n : ev.nodes) {
      add_unique(node_events_[n], e);
      add_unique(stage_events_[n], e);
    }
    for (std::size_t f = 0; f < model_.flows.size(); ++f) {
      if (std::find(ev.flows.begin(), ev.flows.end(), model_.flows[f].id) == ev.flows.end()) {
        continue;
      }
      add_unique(flow_events_[f], e);
      add_unique(stage_events_[model_.flows[f].src], e);
      add_unique(stage_events_[model_.flows[f].dst], e);
    }
    for (std::size_t t = 0; t < model_.triggers.size(); ++t) {
      if (std::find(ev.triggers.begin(), ev.triggers.end(), model_.triggers[t].id) ==
          ev.triggers.end()) {
        continue;
      }
      add_unique(trigger_events_[t], e);
      add_unique(stage_events_[model_.triggers[t].src], e);
      add_unique(stage_events_[model_.triggers[t].dst], e);
    }
  }
  if (model_.chronology) {
    for (std::size_t e = 0; e < model_.events.size(); ++e) {
      for (const auto& p : predecessors(*model_.chronology, model_.events[e].name)) {
        for (std::size_t q = 0; q < model_.events.size(); ++q) {
          if (model_.events[q].name == p) event_predecessors_[e].push_back(q);
        }
      }
    }
  }

  // Create stages no trigger reaches are entry points.
  std::set<StageRef> triggered;
  for (const auto& t : model_.triggers) triggered.insert(t.dst);
  for (const auto& s : used_stages(model_)) {
    if (s.kind == StageKind::Create && !triggered.count(s)) entry_creates_.push_back(s);
  }

  std::set<StageRef> fed_from_env;
  for (const auto& f : model_.flows) {
    if (f.src.is_env()) fed_from_env.insert(f.dst);
  }
  for (const auto& inj : scenario_.injections) {
    if (!model_.find_thing(inj.thing)) invalid("injection names unknown thing '" + inj.thing + "'");
    auto stage = parse_stage(model_, inj.stage);
    if (!stage || !(stage->is_env() || stage->kind == StageKind::Create ||
                    fed_from_env.count(*stage))) {
      invalid("injection stage '" + inj.stage +
              "' must be env.transfer, a stage fed from it, or a create stage");
    }
  }

  for (const auto& [key, branches] : scenario_.choices) {
    std::string canonical;
    if (dp_set.count(key)) {
      canonical = key;
    } else {
      std::vector<std::string> in_machine;
      for (const auto& dp : decision_points_) {
        auto stage = parse_stage(model_, dp);
        if (stage && join_path(stage->machine_path) == key) in_machine.push_back(dp);
      }
      if (in_machine.size() != 1) invalid("'" + key + "' is not a decision point of the model");
      canonical = in_machine.front();
    }
    if (choices_.count(canonical)) invalid("decision point '" + canonical + "' chosen twice");
    const StageRef stage = *parse_stage(model_, canonical);
    for (const auto& b : branches) {
      const auto& outs = out_flows_[stage];
      const bool found = std::any_of(outs.begin(), outs.end(), [&](std::size_t f) {
        return branch_matches(model_.flows[f].dst, b);
      });
      if (!found) invalid("'" + b + "' is not a branch of decision point '" + canonical + "'");
    }
    choices_[canonical] = branches;
  }

  for (const auto& [key, value] : scenario_.gates) {
    bool found = false;
    for (std::size_t i = 0; i < model_.triggers.size(); ++i) {
      const auto& src = model_.triggers[i].src;
      if (src.str() == key || join_path(src.machine_path) == key) {
        gates_[i] = {key, value};
        found = true;
      }
    }
    if (!found) invalid("gate '" + key + "' does not name the source of any trigger");
  }
}

SimState Simulator::init() const {
  SimState state;
  state.events.assign(model_.events.size(), {});
  return state;
}

bool Simulator::eligible(const SimState& state, std::size_t event) const {
  for (auto p : event_predecessors_[event]) {
    if (!state.events[p].started) return false;
  }
  return true;
}

bool Simulator::open(const SimState& state, const std::vector<std::size_t>& events) const {
  if (events.empty()) return true;
  return std::any_of(events.begin(), events.end(),
                     [&](std::size_t e) { return eligible(state, e); });
}

std::vector<std::size_t> Simulator::candidates(const Token& token) const {
  std::vector<std::size_t> outs;
  if (auto it = out_flows_.find(token.at); it != out_flows_.end()) {
    for (auto f : it->second) {
      if (model_.flows[f].thing == token.thing) outs.push_back(f);
    }
  }
  if (token.at.kind != StageKind::Transfer || !token.came_from || outs.size() < 2) return outs;

  // A transfer stage is a gateway both ways: things arriving from outside go
  // inward, things coming from inside go outward.
  const MachinePath& here = token.at.machine_path;
  auto inside = [&](const StageRef& s) { return !s.is_env() && within(s.machine_path, here); };
  const bool from_inside = inside(*token.came_from);
  std::vector<std::size_t> directed;
  for (auto f : outs) {
    if (from_inside != inside(model_.flows[f].dst)) directed.push_back(f);
  }
  if (!directed.empty()) return directed;
  std::vector<std::size_t> rest;
  for (auto f : outs) {
    if (model_.flows[f].dst != *token.came_from) rest.push_back(f);
  }
  return rest;
}

StepResult Simulator::step(const SimState& prior) const {
  StepResult result{prior, {}};
  SimState& st = result.state;
  if (st.terminated) return result;

  const long s = st.step;
  auto& out = result.entries;
  bool activity = false;
  static const std::vector<std::size_t> kNone;

  auto emit = [&](TraceKind kind, std::string subject, std::string detail) {
    out.push_back({s, kind, std::move(subject), std::move(detail)});
    if (kind != TraceKind::EventStart && kind != TraceKind::EventEnd) activity = true;
  };
  auto lookup = [&](const std::map<StageRef, std::vector<std::size_t>>& table,
                    const StageRef& stage) -> const std::vector<std::size_t>& {
    auto it = table.find(stage);
    return it == table.end() ? kNone : it->second;
  };
  // Region activity; an eligible event that has not started starts here.
  auto exercise = [&](const std::vector<std::size_t>& events) {
    for (auto e : events) {
      auto& rt = st.events[e];
      if (!rt.started) {
        if (!eligible(st, e)) continue;
        rt.started = true;
        rt.time.received_at = s;
        st.fired_events.push_back(model_.events[e].name);
        emit(TraceKind::EventStart, model_.events[e].name, "");
      }
      rt.last_exercised = s;
    }
  };
  auto queue_triggers = [&](const StageRef& stage) {
    if (auto it = triggers_from_.find(stage); it != triggers_from_.end()) {
      for (auto t : it->second) st.pending.push_back({t, s});
    }
  };
  auto new_token = [&](const std::string& thing, const StageRef& at,
                       std::optional<StageRef> came_from, TraceKind kind, const std::string& detail) {
    Token token{st.next_token++, thing, at, std::move(came_from), s, s};
    ++st.created;
    emit(kind, token_name(token.id), detail);
    st.tokens.push_back(std::move(token));
  };
  auto mint = [&](const StageRef& stage, const std::string& cause) {
    auto it = created_things_.find(stage);
    if (it == created_things_.end()) {
      emit(TraceKind::Create, stage.str(), cause);
    } else {
      for (const auto& thing : it->second) {
        new_token(thing, stage, std::nullopt, TraceKind::Create,
                  thing + " @" + stage.str() + " " + cause);
      }
    }
    exercise(lookup(stage_events_, stage));
    queue_triggers(stage);
  };

  // 1. Injections.
  for (const auto& inj : scenario_.injections) {
    if (inj.step != s) continue;
    const StageRef stage = *parse_stage(model_, inj.stage);
    const std::string detail = inj.thing + " @" + stage.str() + " injected";
    if (stage.kind == StageKind::Create) {
      new_token(inj.thing, stage, std::nullopt, TraceKind::Create, detail);
    } else {
      std::optional<StageRef> from;
      if (!stage.is_env()) from = env_transfer();
      new_token(inj.thing, stage, from, TraceKind::Receive, detail);
    }
    exercise(lookup(node_events_, stage));
    queue_triggers(stage);
  }

  // 2. Entry creates: once when their region opens, every step while a
  //    perpetual region holds them.
  for (const auto& stage : entry_creates_) {
    const auto& events = lookup(stage_events_, stage);
    bool fire = false;
    if (events.empty()) {
      fire = !st.minted.count(stage);
    } else {
      bool any = false;
      bool perpetual = false;
      for (auto e : events) {
        if (!eligible(st, e)) continue;
        any = true;
        perpetual = perpetual || model_.events[e].perpetual;
      }
      fire = any && (perpetual || !st.minted.count(stage));
    }
    if (!fire) continue;
    st.minted.insert(stage);
    mint(stage, "entry");
  }

  // 3. Triggers queued in earlier steps.
  std::vector<PendingTrigger> waiting;
  std::vector<PendingTrigger> ready;
  for (const auto& p : st.pending) {
    (p.queued_step < s ? ready : waiting).push_back(p);
  }
  for (const auto& p : ready) {
    const TriggerEdge& trig = model_.triggers[p.trigger];
    if (!open(st, trigger_events_[p.trigger])) {
      waiting.push_back(p);
      continue;
    }
    if (auto g = gates_.find(p.trigger); g != gates_.end()) {
      emit(TraceKind::Gate, trig.id, g->second.first + (g->second.second ? " open" : " closed"));
      if (!g->second.second) continue;
    }
    emit(TraceKind::Trigger, trig.id, trig.str());
    exercise(trigger_events_[p.trigger]);
    if (trig.dst.kind == StageKind::Create) {
      mint(trig.dst, "activated by " + trig.id);
    } else {
      emit(arrival_kind(trig.dst.kind), trig.dst.str(), "activated by " + trig.id);
      exercise(lookup(node_events_, trig.dst));
      queue_triggers(trig.dst);
    }
  }
  st.pending = std::move(waiting);

  // 4. Movement, one hop per token.
  const std::size_t live = st.tokens.size();
  std::vector<bool> gone(live, false);
  for (std::size_t i = 0; i < live; ++i) {
    Token& token = st.tokens[i];
    if (token.last_active >= s) continue;
    const auto options = candidates(token);
    if (options.empty()) continue;
    std::size_t chosen = options.front();
    if (options.size() == 1) {
      if (!open(st, flow_events_[chosen])) continue;
    } else {
      const std::string dp = token.at.str();
      auto c = choices_.find(dp);
      const std::size_t cursor = st.choice_cursor[dp];
      if (c == choices_.end() || cursor >= c->second.size()) {
        throw Error(std::string(codes::kUnresolvedChoice),
                    "no choice left for decision point '" + dp + "' (token " +
                        token_name(token.id) + ")");
      }
      const std::string& branch = c->second[cursor];
      auto hit = std::find_if(options.begin(), options.end(), [&](std::size_t f) {
        return branch_matches(model_.flows[f].dst, branch);
      });
      if (hit == options.end()) {
        throw Error(std::string(codes::kUnresolvedChoice),
                    "branch '" + branch + "' is not reachable from '" + dp + "' for " +
                        token_name(token.id));
      }
      chosen = *hit;
      if (!open(st, flow_events_[chosen])) continue;
      ++st.choice_cursor[dp];
      emit(TraceKind::Choice, dp, branch);
    }
    const FlowEdge& flow = model_.flows[chosen];
    const std::string subject = token_name(token.id);
    token.came_from = token.at;
    token.at = flow.dst;
    token.last_active = s;
    if (flow.dst.is_env()) {
      emit(TraceKind::Move, subject, flow.str() + " departed");
      gone[i] = true;
      ++st.departed;
    } else {
      emit(arrival_kind(flow.dst.kind), subject, flow.str());
    }
    exercise(flow_events_[chosen]);
    exercise(lookup(node_events_, flow.dst));
    queue_triggers(flow.dst);
  }
  std::vector<Token> kept;
  kept.reserve(st.tokens.size());
  for (std::size_t i = 0; i < st.tokens.size(); ++i) {
    if (i >= live || !gone[i]) kept.push_back(std::move(st.tokens[i]));
  }
  st.tokens = std::move(kept);

  // 5. Non-perpetual events idle for a whole step release their time.
  for (std::size_t e = 0; e < model_.events.size(); ++e) {
    auto& rt = st.events[e];
    if (!rt.started || rt.ended || model_.events[e].perpetual || rt.last_exercised >= s) continue;
    rt.ended = true;
    rt.time.released_at = s;
    emit(TraceKind::EventEnd, model_.events[e].name, "");
  }

  const bool more_input = std::any_of(scenario_.injections.begin(), scenario_.injections.end(),
                                      [&](const Injection& inj) { return inj.step > s; });
  if (!activity && !more_input) {
    st.terminated = Termination::Quiescent;
  } else {
    st.step = s + 1;
    if (st.step >= scenario_.max_steps) st.terminated = Termination::StepLimit;
  }
  return result;
}

Trace Simulator::run() const {
  Trace trace;
  SimState state = init();
  while (!state.terminated) {
    StepResult r = step(state);
    trace.entries.insert(trace.entries.end(), std::make_move_iterator(r.entries.begin()),
                         std::make_move_iterator(r.entries.end()));
    state = std::move(r.state);
  }
  trace.fired_events = state.fired_events;
  trace.terminated = *state.terminated;
  for (const auto& [dp, branches] : choices_) {
    auto it = state.choice_cursor.find(dp);
    const std::size_t used = it == state.choice_cursor.end() ? 0 : it->second;
    if (used < branches.size()) {
      trace.warnings.push_back(make_warning(
          codes::kUnconsumedChoice, dp,
          std::to_string(branches.size() - used) + " choice(s) for '" + dp + "' never consumed"));
    }
  }
  return trace;
}

Trace simulate(const Model& model, const Scenario& scenario) {
  return Simulator(model, scenario).run();
}

bool conforms(const Trace& trace, const Chronology& chronology) {
  std::map<std::string, bool> perpetual;
  for (const auto& n : chronology.nodes) perpetual[n.event] = n.perpetual;
  for (const auto& e : trace.fired_events) {
    if (!perpetual.count(e)) {
      throw Error(std::string(codes::kUnknownEvent), "trace names unknown event '" + e + "'");
    }
  }
  // Prefix closure: every predecessor of a fired event fired before it.
  std::set<std::string> seen;
  for (const auto& e : trace.fired_events) {
    for (const auto& p : predecessors(chronology, e)) {
      if (!seen.count(p)) return false;
    }
    if (!seen.insert(e).second) return false;
  }
  Chronology sub;
  std::vector<std::string> order;
  for (const auto& e : trace.fired_events) {
    if (perpetual[e]) continue;
    sub.nodes.push_back({e, false});
    order.push_back(e);
  }
  for (const auto& [a, b] : chronology.edges) {
    if (seen.count(a) && seen.count(b) && !perpetual[a] && !perpetual[b]) sub.edges.emplace_back(a, b);
  }
  return is_linear_extension(sub, order);
}

}  // namespace thinging
