#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "thinging/diagnostic.hpp"
#include "thinging/model.hpp"

namespace thinging {

/// Stage reference as written: dotted machine path plus a stage kind. Paths
/// are resolved against the machine tree by build_model.
struct StagePath {
  MachinePath segments;
  StageKind kind = StageKind::Create;
  std::optional<SourceSpan> span;
};

struct MachineDecl {
  std::string name;
  std::vector<MachineDecl> children;
  std::optional<SourceSpan> span;
};

struct ThingDecl {
  std::string name;
  std::optional<SourceSpan> span;
};

struct FlowDecl {
  std::string thing;
  StagePath src;
  StagePath dst;
  std::optional<SourceSpan> span;
};

struct TriggerDecl {
  StagePath src;
  StagePath dst;
  std::optional<SourceSpan> span;
};

/// Raw, unchecked element collection.
struct ModelElements {
  std::string name;
  std::vector<ThingDecl> things;
  std::vector<MachineDecl> machines;
  std::vector<FlowDecl> flows;
  std::vector<TriggerDecl> triggers;
};

struct ValidateOptions {
  /// Report cross-boundary non-transfer flows as warnings instead of errors.
  bool lax = false;
};

/// Legality of a flow from `src` to `dst`, same machine or across machines.
bool flow_legal(StageKind src, StageKind dst, bool same_machine);

/// Builds and validates a model. Every problem is reported, not just the
/// first; warnings are returned alongside a successful model.
Result<Model> build_model(const ModelElements& elements, ValidateOptions options = {});

/// All well-formedness findings for a structurally complete model. Pure and
/// deterministic in its output order.
Diagnostics validate(const Model& model, ValidateOptions options = {});

struct MachineRef {
  std::size_t index;
  bool operator==(const MachineRef&) const = default;
};

using Resolved = std::variant<StageRef, MachineRef>;

/// Resolves "a.b.kind" to a stage, or "a.b" to a machine. Unknown segments
/// yield E101 naming the first segment that does not exist.
Result<Resolved> resolve(const Model& model, std::string_view path);

/// Things carried by flows incident to `stage`, in declaration order.
std::vector<std::string> things_at(const Model& model, const StageRef& stage);

}  // namespace thinging
