#pragma once

#include <string>

#include "rearrange/graph.hpp"

namespace rearrange {

/// Node summary (workspace position of each centroid, member count) and
/// the adjacency list.
std::string inspect_text(const TransitionGraph& graph);

/// One row per node: node,x,y,member_count,targets (targets `;`-separated).
std::string inspect_csv(const TransitionGraph& graph);

}  // namespace rearrange
