#pragma once

#include <string>

#include "thinging/model.hpp"

namespace thinging {

/// Machines as nested clusters, stages as nodes labeled with their kind,
/// flows solid with the thing as label, triggers dashed. Stage node ids are
/// `"<machine path>.<kind>"`; edges carry `id="f1"` / `id="t1"`.
std::string render_static(const Model& model);

/// The static rendering followed by one subgraph per event (`event_<name>`)
/// restating its region nodes with a per-event outline color, plus a legend
/// cluster. Machine clusters already own every node, so event boundaries
/// are color coded instead of drawn as enclosing clusters.
/// Throws Error when the model has no events.
std::string render_events(const Model& model);

/// One node per chronology event, one edge per precedence pair.
/// Throws Error when the chronology is absent or cyclic.
std::string render_chronology(const Model& model);

}  // namespace thinging
