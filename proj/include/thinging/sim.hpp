#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "thinging/diagnostic.hpp"
#include "thinging/model.hpp"

namespace thinging {

struct Injection {
  std::string thing;
  std::string stage;  // dotted stage reference
  long step = 0;

  bool operator==(const Injection&) const = default;
};

/// Everything a run needs that the model leaves open: external inputs,
/// branch choices (consumed in order per decision point), gate settings.
struct Scenario {
  std::vector<Injection> injections;
  std::map<std::string, std::vector<std::string>> choices;
  std::map<std::string, bool> gates;
  long max_steps = 100;

  bool operator==(const Scenario&) const = default;
};

inline constexpr long kDefaultMaxSteps = 100;

/// Reads the line-oriented scenario format:
///   inject <thing> <stageref> @<step>   (env.transfer, a stage fed from it, or a create)
///   choose <decision-point> <branch>
///   gate <gate> true|false
///   max_steps <n>
/// Throws Error on malformed lines.
Scenario parse_scenario(std::string_view text, std::string_view file = "<scenario>");

enum class TraceKind {
  Create,
  Move,
  Process,
  Release,
  Transfer,
  Receive,
  Trigger,
  EventStart,
  EventEnd,
  Choice,
  Gate
};

std::string_view to_string(TraceKind kind);
std::optional<TraceKind> parse_trace_kind(std::string_view word);

struct TraceEntry {
  long step = 0;
  TraceKind kind = TraceKind::Move;
  std::string subject;
  std::string detail;

  bool operator==(const TraceEntry&) const = default;
};

enum class Termination { Quiescent, StepLimit };

std::string_view to_string(Termination t);

struct Trace {
  std::vector<TraceEntry> entries;
  std::vector<std::string> fired_events;
  Termination terminated = Termination::Quiescent;
  Diagnostics warnings;
};

/// Tab-separated entries plus a trailing `terminated=<reason>` line.
std::string write_trace(const Trace& trace);
/// Inverse of write_trace; fired_events is rebuilt from event_start entries.
Trace read_trace(std::string_view text);

/// One manifestation of a thing sitting at a stage.
struct Token {
  long id = 0;
  std::string thing;
  StageRef at;
  std::optional<StageRef> came_from;
  long born_step = 0;
  long last_active = -1;

  bool operator==(const Token&) const = default;
};

struct EventRuntime {
  bool started = false;
  bool ended = false;
  long last_exercised = -1;
  EventTime time;

  bool operator==(const EventRuntime&) const = default;
};

struct PendingTrigger {
  std::size_t trigger = 0;
  long queued_step = 0;

  bool operator==(const PendingTrigger&) const = default;
};

struct SimState {
  long step = 0;
  std::vector<Token> tokens;
  std::vector<PendingTrigger> pending;
  std::vector<EventRuntime> events;
  std::map<std::string, std::size_t> choice_cursor;
  std::set<StageRef> minted;
  long created = 0;
  long departed = 0;
  long next_token = 1;
  std::vector<std::string> fired_events;
  std::optional<Termination> terminated;

  bool operator==(const SimState&) const = default;
};

struct StepResult {
  SimState state;
  std::vector<TraceEntry> entries;
};

/// A model paired with a checked scenario, with the lookup tables the
/// engine needs. Construction throws Error if the scenario names decision
/// points, branches, gates, things or stages the model does not have.
class Simulator {
 public:
  Simulator(Model model, Scenario scenario);

  const Model& model() const { return model_; }
  const Scenario& scenario() const { return scenario_; }

  SimState init() const;
  /// One macro-step. Stepping a terminated state returns it unchanged with
  /// no entries. Throws Error(E401) when a needed choice is missing.
  StepResult step(const SimState& state) const;
  Trace run() const;

  /// Canonical decision-point ids (stage references) of the model.
  const std::vector<std::string>& decision_points() const { return decision_points_; }

 private:
  bool eligible(const SimState& state, std::size_t event) const;
  bool open(const SimState& state, const std::vector<std::size_t>& events) const;
  std::vector<std::size_t> candidates(const Token& token) const;

  Model model_;
  Scenario scenario_;
  std::vector<std::string> decision_points_;
  // Resolved lookup tables.
  std::map<std::string, std::vector<std::string>> choices_;  // canonical dp -> branches
  std::map<std::size_t, std::pair<std::string, bool>> gates_;  // trigger -> (gate id, open)
  std::map<StageRef, std::vector<std::size_t>> out_flows_;
  std::map<StageRef, std::vector<std::size_t>> triggers_from_;
  std::map<StageRef, std::vector<std::string>> created_things_;
  std::map<StageRef, std::vector<std::size_t>> node_events_;
  std::vector<std::vector<std::size_t>> flow_events_;
  std::vector<std::vector<std::size_t>> trigger_events_;
  std::vector<StageRef> entry_creates_;
  std::map<StageRef, std::vector<std::size_t>> stage_events_;  // regions touching a stage
  std::vector<std::vector<std::size_t>> event_predecessors_;
};

/// Runs to quiescence or the step limit.
Trace simulate(const Model& model, const Scenario& scenario);

/// True iff the non-perpetual fired events are in an order the chronology
/// admits and each fired event's predecessors fired before it. Throws Error
/// if the trace names an event the chronology lacks.
bool conforms(const Trace& trace, const Chronology& chronology);

}  // namespace thinging
