#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rearrange/buffer.hpp"
#include "rearrange/controller.hpp"
#include "rearrange/graph.hpp"
#include "rearrange/perception.hpp"
#include "rearrange/random.hpp"

namespace rearrange {

/// Same distribution as the controller's fallback.
inline Action random_policy(Vec2 workspace, Rng& rng) { return uniform_random_action(workspace, rng); }

// ---- non-factorised graph search -----------------------------------------

/// Sorted multiset of per-entity node indices: the whole configuration.
using SetKey = std::vector<int>;

SetKey set_key(const EntitySet& entities, const TransitionGraph& base);

/// Graph over whole entity-set configurations.
struct SetGraph {
    std::map<SetKey, int> nodes;
    std::vector<SetKey> keys;  // by node id
    std::map<std::pair<int, int>, Action> edges;

    std::optional<int> find(const SetKey& key) const;
    int add_node(const SetKey& key);
    std::size_t node_count() const { return keys.size(); }
};

SetGraph nf_build(const ExperienceBuffer& buffer, const Perception& perception, const TransitionGraph& base);

/// Unit-weight Dijkstra. Returns the node path from `from` to `to`
/// inclusive; ties settle towards lower node ids.
std::optional<std::vector<int>> shortest_path(const SetGraph& graph, int from, int to);

enum class NfFallback { none, bind_fail, no_path, at_goal };

struct NfDecision {
    Action action;
    NfFallback fallback = NfFallback::none;
    int path_length = -1;
};

/// Exact-key binding of both observations, then the first edge of a
/// shortest path; any failure yields a random action.
NfDecision nf_select_action(const SetGraph& set_graph, const TransitionGraph& base, const EntitySet& current,
                            const EntitySet& goal, Vec2 workspace, Rng& rng);
NfDecision nf_select_action(const SetGraph& set_graph, const TransitionGraph& base, const Raster& current,
                            const Raster& goal, const Perception& perception, Vec2 workspace, Rng& rng);

// ---- model-predictive control ----------------------------------------------

/// One-step predictor built from the transition graph: an action that picks
/// near a stored edge's pick point sends exactly that entity to the edge target.
struct RolloutModel {
    const TransitionGraph* graph = nullptr;
    double action_match_tol = 0.125;
};

/// Entity index the model moves and its target node, if any.
struct RolloutMove {
    int entity = -1;
    int target = -1;
};

/// Node-space step: `nodes` holds each entity's bound node.
RolloutMove rollout_move(const RolloutModel& model, const std::vector<int>& nodes, const Action& action);

/// Predicts entity states after `action`; at most one state changes.
std::vector<State> rollout(const RolloutModel& model, const std::vector<State>& states, const Action& action);

struct CemParams {
    int iterations = 10;
    double elite_ratio = 0.05;
    int population = 250;
    int horizon = 5;
    double init_std = 0.3;
    double min_std = 1e-3;

    int elite_count() const { return static_cast<int>(population * elite_ratio); }
    void validate() const;
};

struct CemResult {
    Action action;
    std::vector<double> best_cost;  // per iteration
};

/// Sum over aligned goal constraints of squared Euclidean distance between
/// predicted and goal states, for the given action sequence.
double plan_cost(const RolloutModel& model, const EntitySet& current, const EntitySet& goal,
                 const std::vector<Action>& plan);

/// Cross-entropy method over action sequences; returns the first action of
/// the lowest-cost elite. Elites are carried into the next population, so
/// the best cost never increases.
CemResult cem_plan(const RolloutModel& model, const EntitySet& current, const EntitySet& goal,
                   const CemParams& params, Vec2 workspace, Rng& rng);
Action cem_plan(const RolloutModel& model, const Raster& current, const Raster& goal, const Perception& perception,
                const CemParams& params, Vec2 workspace, Rng& rng);

}  // namespace rearrange
