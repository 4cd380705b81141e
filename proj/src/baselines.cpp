#include "rearrange/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace rearrange {

SetKey set_key(const EntitySet& entities, const TransitionGraph& base) {
    SetKey key;
    key.reserve(entities.size());
    for (const auto& e : entities) key.push_back(base.bind(e.state).node);
    std::sort(key.begin(), key.end());
    return key;
}

std::optional<int> SetGraph::find(const SetKey& key) const {
    const auto it = nodes.find(key);
    if (it == nodes.end()) return std::nullopt;
    return it->second;
}

int SetGraph::add_node(const SetKey& key) {
    const auto [it, inserted] = nodes.emplace(key, static_cast<int>(keys.size()));
    if (inserted) keys.push_back(key);
    return it->second;
}

SetGraph nf_build(const ExperienceBuffer& buffer, const Perception& perception, const TransitionGraph& base) {
    if (buffer.episodes.empty()) throw std::invalid_argument("nf_build: empty buffer");
    SetGraph g;
    for (const auto& ep : buffer.episodes) {
        std::vector<int> ids;
        for (const auto& o : ep.observations) ids.push_back(g.add_node(set_key(perception.perceive(o), base)));
        for (std::size_t t = 0; t < ep.actions.size(); ++t)
            if (ids[t] != ids[t + 1]) g.edges[{ids[t], ids[t + 1]}] = ep.actions[t];
    }
    if (g.edges.empty()) throw std::runtime_error("no usable transitions");
    return g;
}

std::optional<std::vector<int>> shortest_path(const SetGraph& graph, int from, int to) {
    const int n = static_cast<int>(graph.node_count());
    if (from < 0 || to < 0 || from >= n || to >= n) return std::nullopt;
    constexpr int unreached = std::numeric_limits<int>::max();
    std::vector<int> dist(n, unreached), parent(n, -1);
    using Item = std::pair<int, int>;  // (distance, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[from] = 0;
    open.push({0, from});
    while (!open.empty()) {
        const auto [d, u] = open.top();
        open.pop();
        if (d != dist[u]) continue;
        if (u == to) break;
        for (auto it = graph.edges.lower_bound({u, std::numeric_limits<int>::min()});
             it != graph.edges.end() && it->first.first == u; ++it) {
            const int v = it->first.second;
            if (d + 1 < dist[v]) {
                dist[v] = d + 1;
                parent[v] = u;
                open.push({d + 1, v});
            }
        }
    }
    if (dist[to] == unreached) return std::nullopt;
    std::vector<int> path{to};
    while (path.back() != from) path.push_back(parent[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
}

NfDecision nf_select_action(const SetGraph& set_graph, const TransitionGraph& base, const EntitySet& current,
                            const EntitySet& goal, Vec2 workspace, Rng& rng) {
    NfDecision d;
    const auto fail = [&](NfFallback cause) {
        d.fallback = cause;
        d.action = random_policy(workspace, rng);
        return d;
    };
    const auto from = set_graph.find(set_key(current, base));
    const auto to = set_graph.find(set_key(goal, base));
    if (!from || !to) return fail(NfFallback::bind_fail);
    if (*from == *to) return fail(NfFallback::at_goal);
    const auto path = shortest_path(set_graph, *from, *to);
    if (!path) return fail(NfFallback::no_path);
    d.path_length = static_cast<int>(path->size()) - 1;
    d.action = set_graph.edges.at({(*path)[0], (*path)[1]});
    return d;
}

NfDecision nf_select_action(const SetGraph& set_graph, const TransitionGraph& base, const Raster& current,
                            const Raster& goal, const Perception& perception, Vec2 workspace, Rng& rng) {
    return nf_select_action(set_graph, base, perception.perceive(current), perception.perceive(goal), workspace, rng);
}

RolloutMove rollout_move(const RolloutModel& model, const std::vector<int>& nodes, const Action& action) {
    const TransitionGraph& g = *model.graph;
    const auto& edges = g.edges();
    const auto range = [&](int node) {
        return std::pair{edges.lower_bound({node, std::numeric_limits<int>::min()}),
                         edges.lower_bound({node + 1, std::numeric_limits<int>::min()})};
    };

    RolloutMove mv;
    double best_pick = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < nodes.size(); ++e) {
        const auto [b, end] = range(nodes[e]);
        for (auto it = b; it != end; ++it) {
            const double d = distance(it->second.action.w, action.w);
            if (d <= model.action_match_tol && d < best_pick) {
                best_pick = d;
                mv.entity = static_cast<int>(e);
            }
        }
    }
    if (mv.entity < 0) return mv;

    // destination: nearest stored edge target, unless staying put is nearer
    const int src = nodes[static_cast<std::size_t>(mv.entity)];
    const Vec2 dest = action.destination();
    double best = distance(g.node_position(src), dest);
    const auto [b, end] = range(src);
    for (auto it = b; it != end; ++it) {
        if (distance(it->second.action.w, action.w) > model.action_match_tol) continue;
        const double d = distance(it->second.action.destination(), dest);
        if (d < best) {
            best = d;
            mv.target = it->first.second;
        }
    }
    if (mv.target < 0) return {};
    for (std::size_t e = 0; e < nodes.size(); ++e)
        if (static_cast<int>(e) != mv.entity && nodes[e] == mv.target) return {};
    return mv;
}

std::vector<State> rollout(const RolloutModel& model, const std::vector<State>& states, const Action& action) {
    std::vector<int> nodes;
    nodes.reserve(states.size());
    for (const auto& s : states) nodes.push_back(model.graph->bind(s).node);
    auto out = states;
    const RolloutMove mv = rollout_move(model, nodes, action);
    if (mv.entity >= 0)
        out[static_cast<std::size_t>(mv.entity)] = to_state(model.graph->nodes()[static_cast<std::size_t>(mv.target)].centroid);
    return out;
}

void CemParams::validate() const {
    if (iterations < 1) throw ConfigError("cem iterations must be positive");
    if (horizon < 1) throw ConfigError("cem horizon must be positive");
    if (elite_count() < 2) throw ConfigError("population x elite_ratio must be at least 2");
    if (!(init_std > 0) || !(min_std > 0)) throw ConfigError("cem std must be positive");
}

namespace {

// Precomputed terms so a candidate plan costs only node lookups.
class PlanScorer {
public:
    PlanScorer(const RolloutModel& model, const EntitySet& current, const EntitySet& goal) : model_(model) {
        const auto& g = *model.graph;
        for (const auto& e : current) start_.push_back(g.bind(e.state).node);
        if (current.empty() || goal.empty()) return;
        const Alignment a = align(current, goal);
        for (std::size_t k = 0; k < goal.size(); ++k) {
            const int c = a.goal_to_current[k];
            if (c < 0) continue;
            Term t;
            t.entity = c;
            t.unmoved = distance(MetricKind::squared_euclidean, current[static_cast<std::size_t>(c)].state, goal[k].state);
            for (const auto& n : g.nodes())
                t.at_node.push_back(distance(MetricKind::squared_euclidean, to_state(n.centroid), goal[k].state));
            terms_.push_back(std::move(t));
        }
    }

    double operator()(const std::vector<Action>& plan) const {
        std::vector<int> nodes = start_;
        std::vector<char> moved(nodes.size(), 0);
        for (const auto& a : plan) {
            const RolloutMove mv = rollout_move(model_, nodes, a);
            if (mv.entity < 0) continue;
            nodes[static_cast<std::size_t>(mv.entity)] = mv.target;
            moved[static_cast<std::size_t>(mv.entity)] = 1;
        }
        double cost = 0.0;
        for (const auto& t : terms_) {
            const auto e = static_cast<std::size_t>(t.entity);
            cost += moved[e] ? t.at_node[static_cast<std::size_t>(nodes[e])] : t.unmoved;
        }
        return cost;
    }

private:
    struct Term {
        int entity = 0;
        double unmoved = 0.0;
        std::vector<double> at_node;
    };
    const RolloutModel& model_;
    std::vector<int> start_;
    std::vector<Term> terms_;
};

std::vector<Action> unflatten(const std::vector<double>& x) {
    std::vector<Action> plan(x.size() / 4);
    for (std::size_t t = 0; t < plan.size(); ++t)
        plan[t] = Action{{x[4 * t], x[4 * t + 1]}, {x[4 * t + 2], x[4 * t + 3]}};
    return plan;
}

}  // namespace

double plan_cost(const RolloutModel& model, const EntitySet& current, const EntitySet& goal,
                 const std::vector<Action>& plan) {
    return PlanScorer(model, current, goal)(plan);
}

CemResult cem_plan(const RolloutModel& model, const EntitySet& current, const EntitySet& goal,
                   const CemParams& params, Vec2 workspace, Rng& rng) {
    params.validate();
    const PlanScorer score(model, current, goal);
    const std::size_t dim = static_cast<std::size_t>(params.horizon) * 4;
    std::vector<double> mean(dim), stddev(dim, params.init_std);
    for (std::size_t t = 0; t < dim; t += 4) {
        mean[t] = workspace.x / 2;
        mean[t + 1] = workspace.y / 2;
    }

    struct Candidate {
        std::vector<double> x;
        double cost = 0.0;
    };
    const auto elites_n = static_cast<std::size_t>(params.elite_count());
    std::vector<Candidate> elites;
    CemResult result;
    for (int it = 0; it < params.iterations; ++it) {
        std::vector<Candidate> pop = elites;
        while (pop.size() < static_cast<std::size_t>(params.population)) {
            Candidate c;
            c.x.resize(dim);
            for (std::size_t d = 0; d < dim; ++d) c.x[d] = mean[d] + stddev[d] * rng.normal();
            c.cost = score(unflatten(c.x));
            pop.push_back(std::move(c));
        }
        std::stable_sort(pop.begin(), pop.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
        pop.resize(elites_n);
        elites = std::move(pop);

        for (std::size_t d = 0; d < dim; ++d) {
            double m = 0.0;
            for (const auto& e : elites) m += e.x[d];
            m /= static_cast<double>(elites.size());
            double v = 0.0;
            for (const auto& e : elites) v += (e.x[d] - m) * (e.x[d] - m);
            mean[d] = m;
            stddev[d] = std::max(params.min_std, std::sqrt(v / static_cast<double>(elites.size())));
        }
        result.best_cost.push_back(elites.front().cost);
    }
    result.action = unflatten(elites.front().x).front();
    return result;
}

Action cem_plan(const RolloutModel& model, const Raster& current, const Raster& goal, const Perception& perception,
                const CemParams& params, Vec2 workspace, Rng& rng) {
    return cem_plan(model, perception.perceive(current), perception.perceive(goal), params, workspace, rng).action;
}

}  // namespace rearrange
