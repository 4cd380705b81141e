#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include "rearrange/align.hpp"
#include "rearrange/graph.hpp"
#include "rearrange/perception.hpp"
#include "rearrange/random.hpp"

namespace rearrange {

enum class SelectionMode { stochastic, argmax };

std::string to_string(SelectionMode m);
SelectionMode parse_selection_mode(const std::string& s);

struct ControllerConfig {
    SelectionMode selection_mode = SelectionMode::stochastic;
    // In units of the graph's isolate metric; constraints at or below it count as met.
    double satisfied_threshold = 0.125;
    // Bindings farther than this are rejected (random fallback).
    double bind_max_distance = std::numeric_limits<double>::infinity();
    // Emit the stored edge action verbatim instead of re-targeting it.
    bool strict_actions = false;

    /// Threshold from the env's place_threshold, expressed in metric units
    /// (squared for squared_euclidean). Mask metrics reject bindings with
    /// no overlap at all.
    static ControllerConfig defaults_for(const EnvConfig& env, const GraphConfig& graph);
};

/// Uniform pick over the workspace, displacement uniform in [-0.5, 0.5]^2.
Action uniform_random_action(Vec2 extent, Rng& rng);

/// Picks the next goal constraint to work on. `aligned_current[k]` must be
/// the partner of `goal[k]`. Only constraints with distance above the
/// threshold compete; argmax mode takes the largest (lowest index on ties),
/// stochastic mode samples proportionally to distance.
std::optional<int> select_constraint(const EntitySet& aligned_current, const EntitySet& goal, MetricKind metric,
                                     const ControllerConfig& config, Rng& rng);

enum class Fallback { none, missing_edge, bind_far, cardinality_mismatch, no_constraint };

std::string to_string(Fallback f);

struct Decision {
    Action action;
    Fallback fallback = Fallback::none;
    int constraint = -1;  // index into the canonically ordered goal set
    int from = -1;        // bound nodes, when binding was reached
    int to = -1;
    bool degenerate_alignment = false;
};

struct ControllerDiagnostics {
    std::size_t decisions = 0;
    std::size_t graph_actions = 0;
    std::size_t missing_edge = 0;
    std::size_t bind_far = 0;
    std::size_t cardinality_mismatch = 0;
    std::size_t no_constraint = 0;
    std::size_t degenerate_alignments = 0;

    void record(const Decision& d);
    ControllerDiagnostics& operator+=(const ControllerDiagnostics& o);
};

/// Sorts entities by type vector, then position, so downstream tie-breaks
/// do not depend on perception order.
EntitySet canonical_order(EntitySet set);

/// Graph-lookup action selection against a goal observation.
class Controller {
public:
    Controller(const TransitionGraph& graph, const Perception& perception, ControllerConfig config, Vec2 workspace);

    Decision select_action(const Raster& current, const Raster& goal, Rng& rng) const;
    Decision select_action(const EntitySet& current, const EntitySet& goal, Rng& rng) const;

    const ControllerConfig& config() const { return config_; }

private:
    Decision fallback(Decision d, Fallback cause, Rng& rng) const;

    const TransitionGraph& graph_;
    const Perception& perception_;
    ControllerConfig config_;
    Vec2 workspace_;
};

/// Free-function form of Controller::select_action.
Action select_action(const TransitionGraph& graph, const Raster& current, const Raster& goal,
                     const Perception& perception, const ControllerConfig& config, Vec2 workspace, Rng& rng);

}  // namespace rearrange
