#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thinging/diagnostic.hpp"

namespace thinging {

/// The five things a machine can do with a thing. Nothing else is a stage.
enum class StageKind { Create, Process, Release, Transfer, Receive };

inline constexpr StageKind kAllStageKinds[] = {StageKind::Create, StageKind::Process,
                                               StageKind::Release, StageKind::Transfer,
                                               StageKind::Receive};

std::string_view to_string(StageKind kind);
std::optional<StageKind> parse_stage_kind(std::string_view word);

/// Name of the implicit machine standing for everything outside the model.
inline constexpr std::string_view kEnvMachine = "env";

using MachinePath = std::vector<std::string>;

std::string join_path(const MachinePath& path);

/// Addressable (machine, stage) node; the endpoint of every edge.
struct StageRef {
  MachinePath machine_path;
  StageKind kind = StageKind::Create;

  bool is_env() const { return machine_path.size() == 1 && machine_path.front() == kEnvMachine; }
  std::string str() const;

  auto operator<=>(const StageRef&) const = default;
  bool operator==(const StageRef&) const = default;
};

StageRef env_transfer();

/// True if `inner` is `outer` or nested somewhere below it.
bool within(const MachinePath& inner, const MachinePath& outer);

struct Thing {
  std::string id;
  std::string name;
  /// Set when a root machine carries the same name: the thing is that machine.
  std::optional<std::string> as_machine;

  bool operator==(const Thing&) const = default;
};

struct Machine {
  std::string id;  // qualified path, e.g. "tank.sensor"
  std::string name;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;

  bool operator==(const Machine&) const = default;
};

struct FlowEdge {
  std::string id;
  std::string thing;
  StageRef src;
  StageRef dst;

  std::string str() const;  // "water a.release -> a.transfer"
  bool operator==(const FlowEdge&) const = default;
};

struct TriggerEdge {
  std::string id;
  StageRef src;
  StageRef dst;

  std::string str() const;  // "a.process ~> b.create"
  bool operator==(const TriggerEdge&) const = default;
};

/// Logical time of an event: the step its time was received, and the step it
/// was released (never, for perpetual events).
struct EventTime {
  std::optional<long> received_at;
  std::optional<long> released_at;

  bool operator==(const EventTime&) const = default;
};

/// A region of the static model. Flow and trigger members are stored by id.
struct Event {
  std::string id;  // same as name
  std::string name;
  std::vector<StageRef> nodes;
  std::vector<std::string> flows;
  std::vector<std::string> triggers;
  bool perpetual = false;

  bool operator==(const Event&) const = default;
};

struct ChronologyNode {
  std::string event;
  bool perpetual = false;

  bool operator==(const ChronologyNode&) const = default;
};

/// Precedence relation over events: (before, after) pairs.
struct Chronology {
  std::vector<ChronologyNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;

  bool operator==(const Chronology&) const = default;
};

/// The static graph plus its events. Machines are stored flat in depth-first
/// declaration order; `roots` indexes the top-level ones.
struct Model {
  std::string name;
  std::vector<Thing> things;
  std::vector<Machine> machines;
  std::vector<std::size_t> roots;
  std::vector<FlowEdge> flows;
  std::vector<TriggerEdge> triggers;
  std::vector<Event> events;
  std::optional<Chronology> chronology;

  /// Source locations keyed by element key ("flow:f1", "machine:tank").
  /// Not part of the model's identity.
  std::map<std::string, SourceSpan> spans;

  const Thing* find_thing(std::string_view name) const;
  const Machine* find_machine(const MachinePath& path) const;
  std::optional<std::size_t> machine_index(const MachinePath& path) const;
  const FlowEdge* find_flow(std::string_view id) const;
  const TriggerEdge* find_trigger(std::string_view id) const;
  const Event* find_event(std::string_view name) const;
  MachinePath path_of(std::size_t machine) const;

  std::optional<SourceSpan> span_of(const std::string& key) const;
};

/// Stages touched by at least one flow or trigger, in first-touch order.
std::vector<StageRef> used_stages(const Model& model);
bool stage_in_use(const Model& model, const StageRef& stage);

}  // namespace thinging
