#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thinging/core.hpp"
#include "thinging/diagnostic.hpp"
#include "thinging/model.hpp"

namespace thinging {

/// An event as written: region members are references into the static model.
struct EventDecl {
  std::string name;
  bool perpetual = false;
  std::vector<StagePath> nodes;
  std::vector<FlowDecl> flows;
  std::vector<TriggerDecl> triggers;
  std::optional<SourceSpan> span;
};

struct PrecedenceDecl {
  std::string before;
  std::string after;
  std::optional<SourceSpan> span;
};

struct ChronologyDecl {
  std::vector<PrecedenceDecl> edges;
  std::optional<SourceSpan> span;
};

/// Appends the event if its region is a non-empty subgraph of the static
/// model (E301 otherwise) and its name is new (E303 otherwise). If the model
/// already has a chronology, its node list picks up the new event.
Result<Model> attach_event(const Model& model, const EventDecl& decl);

/// Installs a chronology over every attached event. References are not
/// checked here; see validate_chronology.
Model with_chronology(const Model& model, const ChronologyDecl& decl);

/// E303 for references to undeclared events, E302 once per cyclic strongly
/// connected component (naming one full cycle through it).
Diagnostics validate_chronology(const Model& model);

/// Kahn order, ties broken by node declaration order. Empty if cyclic.
std::optional<std::vector<std::string>> topological_order(const Chronology& chronology);

/// Direct predecessors of `event`.
std::vector<std::string> predecessors(const Chronology& chronology, const std::string& event);

/// True iff every precedence pair appears in order in `sequence`. Throws
/// std::invalid_argument unless `sequence` is a permutation of the nodes.
bool is_linear_extension(const Chronology& chronology, std::span<const std::string> sequence);

struct CoverageReport {
  std::vector<std::string> covered;
  std::vector<std::string> uncovered;
  double ratio = 1.0;
};

CoverageReport coverage(const Model& model);

/// Three-line text block.
std::string format_coverage(const CoverageReport& report);
/// JSON record with the same content.
std::string coverage_json(const CoverageReport& report);

}  // namespace thinging
