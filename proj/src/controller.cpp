#include "rearrange/controller.hpp"

#include <algorithm>
#include <vector>

namespace rearrange {

std::string to_string(SelectionMode m) { return m == SelectionMode::argmax ? "argmax" : "stochastic"; }

SelectionMode parse_selection_mode(const std::string& s) {
    if (s == "argmax") return SelectionMode::argmax;
    if (s == "stochastic") return SelectionMode::stochastic;
    throw ConfigError("unknown selection mode '" + s + "'");
}

std::string to_string(Fallback f) {
    switch (f) {
        case Fallback::none: return "none";
        case Fallback::missing_edge: return "missing_edge";
        case Fallback::bind_far: return "bind_far";
        case Fallback::cardinality_mismatch: return "cardinality_mismatch";
        case Fallback::no_constraint: return "no_constraint";
    }
    return "?";
}

ControllerConfig ControllerConfig::defaults_for(const EnvConfig& env, const GraphConfig& graph) {
    ControllerConfig c;
    const double place = env.place_threshold;
    if (graph.isolate_metric == MetricKind::squared_euclidean) {
        c.satisfied_threshold = place * place;
    } else {
        c.satisfied_threshold = place;
    }
    if (graph.bind_metric != MetricKind::squared_euclidean) c.bind_max_distance = 1.0 - 1e-9;
    return c;
}

Action uniform_random_action(Vec2 extent, Rng& rng) {
    Action a;
    a.w.x = rng.uniform(0.0, extent.x);
    a.w.y = rng.uniform(0.0, extent.y);
    a.dw.x = rng.uniform(-0.5, 0.5);
    a.dw.y = rng.uniform(-0.5, 0.5);
    return a;
}

std::optional<int> select_constraint(const EntitySet& aligned_current, const EntitySet& goal, MetricKind metric,
                                     const ControllerConfig& config, Rng& rng) {
    const std::size_t n = std::min(aligned_current.size(), goal.size());
    std::vector<double> d(n, 0.0);
    double total = 0.0;
    std::optional<int> best;
    for (std::size_t k = 0; k < n; ++k) {
        const double dk = distance(metric, aligned_current[k].state, goal[k].state);
        if (!(dk > config.satisfied_threshold)) continue;
        d[k] = dk;
        total += dk;
        if (!best || dk > d[static_cast<std::size_t>(*best)]) best = static_cast<int>(k);
    }
    if (!best || config.selection_mode == SelectionMode::argmax) return best;

    double r = rng.uniform() * total;
    for (std::size_t k = 0; k < n; ++k) {
        if (d[k] <= 0.0) continue;
        r -= d[k];
        if (r < 0.0) return static_cast<int>(k);
    }
    // rounding left r marginally non-negative: last candidate
    for (std::size_t k = n; k-- > 0;)
        if (d[k] > 0.0) return static_cast<int>(k);
    return best;
}

void ControllerDiagnostics::record(const Decision& d) {
    ++decisions;
    if (d.degenerate_alignment) ++degenerate_alignments;
    switch (d.fallback) {
        case Fallback::none: ++graph_actions; break;
        case Fallback::missing_edge: ++missing_edge; break;
        case Fallback::bind_far: ++bind_far; break;
        case Fallback::cardinality_mismatch: ++cardinality_mismatch; break;
        case Fallback::no_constraint: ++no_constraint; break;
    }
}

ControllerDiagnostics& ControllerDiagnostics::operator+=(const ControllerDiagnostics& o) {
    decisions += o.decisions;
    graph_actions += o.graph_actions;
    missing_edge += o.missing_edge;
    bind_far += o.bind_far;
    cardinality_mismatch += o.cardinality_mismatch;
    no_constraint += o.no_constraint;
    degenerate_alignments += o.degenerate_alignments;
    return *this;
}

EntitySet canonical_order(EntitySet set) {
    std::stable_sort(set.begin(), set.end(), [](const Entity& a, const Entity& b) {
        if (a.type != b.type) return a.type < b.type;
        if (a.position.x != b.position.x) return a.position.x < b.position.x;
        return a.position.y < b.position.y;
    });
    return set;
}

Controller::Controller(const TransitionGraph& graph, const Perception& perception, ControllerConfig config,
                       Vec2 workspace)
    : graph_(graph), perception_(perception), config_(config), workspace_(workspace) {}

Decision Controller::fallback(Decision d, Fallback cause, Rng& rng) const {
    d.fallback = cause;
    d.action = uniform_random_action(workspace_, rng);
    return d;
}

Decision Controller::select_action(const Raster& current, const Raster& goal, Rng& rng) const {
    return select_action(perception_.perceive(current), perception_.perceive(goal), rng);
}

Decision Controller::select_action(const EntitySet& current_in, const EntitySet& goal_in, Rng& rng) const {
    Decision d;
    const EntitySet current = canonical_order(current_in);
    const EntitySet goal = canonical_order(goal_in);
    if (current.empty() || goal.empty() || current.size() < goal.size())
        return fallback(d, Fallback::cardinality_mismatch, rng);

    const Alignment alignment = align(current, goal);
    d.degenerate_alignment = alignment.degenerate;
    EntitySet aligned;
    aligned.reserve(goal.size());
    for (int cur : alignment.goal_to_current) aligned.push_back(current[static_cast<std::size_t>(cur)]);

    const auto k = select_constraint(aligned, goal, graph_.isolate_metric(), config_, rng);
    if (!k) return fallback(d, Fallback::no_constraint, rng);
    d.constraint = *k;

    const Entity& mover = aligned[static_cast<std::size_t>(*k)];
    const BindResult from = graph_.bind(mover.state);
    const BindResult to = graph_.bind(goal[static_cast<std::size_t>(*k)].state);
    d.from = from.node;
    d.to = to.node;
    if (from.distance > config_.bind_max_distance || to.distance > config_.bind_max_distance)
        return fallback(d, Fallback::bind_far, rng);

    const GraphEdge* e = graph_.edge(from.node, to.node);
    if (!e) return fallback(d, Fallback::missing_edge, rng);

    if (config_.strict_actions) {
        d.action = e->action;
    } else {
        d.action.w = mover.position;
        d.action.dw = graph_.node_position(to.node) - mover.position;
    }
    return d;
}

Action select_action(const TransitionGraph& graph, const Raster& current, const Raster& goal,
                     const Perception& perception, const ControllerConfig& config, Vec2 workspace, Rng& rng) {
    return Controller(graph, perception, config, workspace).select_action(current, goal, rng).action;
}

}  // namespace rearrange
