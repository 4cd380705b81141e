#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <deque>

#include "rearrange/baselines.hpp"
#include "rearrange/harness.hpp"

using namespace rearrange;

namespace {

// Plain BFS distance, the oracle for the unit-weight search.
int bfs_distance(const SetGraph& g, int from, int to) {
    std::vector<int> dist(g.node_count(), -1);
    std::deque<int> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        const int u = q.front();
        q.pop_front();
        for (const auto& [key, a] : g.edges) {
            if (key.first != u || dist[key.second] >= 0) continue;
            dist[key.second] = dist[u] + 1;
            q.push_back(key.second);
        }
    }
    return dist[to];
}

Entity at(Vec2 p) {
    Entity e;
    e.state = p;
    e.position = p;
    return e;
}

// Four nodes at the corners of a square; all edges with exact pick points.
TransitionGraph square_graph() {
    const Vec2 corners[] = {{0.1, 0.1}, {0.5, 0.1}, {0.1, 0.5}, {0.5, 0.5}};
    std::vector<GraphNode> nodes;
    for (const auto& c : corners) nodes.push_back({c, 1});
    TransitionGraph g(nodes, StateKind::position, {}, MetricKind::squared_euclidean, MetricKind::squared_euclidean,
                      MetricKind::squared_euclidean);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) g.set_edge(i, j, {corners[i], corners[j] - corners[i]});
    return g;
}

}  // namespace

TEST_CASE("shortest paths agree with BFS on random graphs") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        SetGraph g;
        const int n = 2 + rng.below(12);
        for (int i = 0; i < n; ++i) g.add_node({i});
        const int m = rng.below(3 * n);
        for (int e = 0; e < m; ++e) {
            const int a = rng.below(n), b = rng.below(n);
            if (a != b) g.edges[{a, b}] = Action{};
        }
        const int from = rng.below(n), to = rng.below(n);
        const auto path = shortest_path(g, from, to);
        const int oracle = bfs_distance(g, from, to);
        if (oracle < 0) {
            CHECK(!path);
            continue;
        }
        REQUIRE(path);
        CHECK(static_cast<int>(path->size()) - 1 == oracle);
        CHECK(path->front() == from);
        CHECK(path->back() == to);
        for (std::size_t i = 0; i + 1 < path->size(); ++i) CHECK(g.edges.count({(*path)[i], (*path)[i + 1]}) == 1);
    }
}

TEST_CASE("set keys ignore entity order") {
    const TransitionGraph g = square_graph();
    const EntitySet a{at({0.5, 0.5}), at({0.1, 0.1})};
    const EntitySet b{at({0.1, 0.1}), at({0.49, 0.52})};
    CHECK(set_key(a, g) == SetKey{0, 3});
    CHECK(set_key(a, g) == set_key(b, g));
}

TEST_CASE("nf plans over whole configurations and fails to bind unseen ones") {
    EnvConfig c = EnvConfig::grid_defaults();
    c.image_size = 32;
    c.object_count = 2;
    const auto buffer = generate_buffer(c, {400, 5, 3, true});
    const Perception p(PerceptionConfig::for_env(c));
    const auto g = build_graph(buffer, p, GraphConfig::defaults_for(Variant::grid)).graph;
    const SetGraph sg = nf_build(buffer, p, g);
    CHECK(sg.node_count() > 1);
    for (const auto& key : sg.keys) CHECK(key.size() == 2);

    const Environment env(c);
    Rng rng(0);
    int planned = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto [s, task] = env.reset(seed);
        const auto d = nf_select_action(sg, g, task.initial, task.goal, p, c.extent(), rng);
        if (d.fallback == NfFallback::none) {
            ++planned;
            CHECK(d.path_length >= 1);
        }
    }
    CHECK(planned > 0);

    c.object_count = 3;
    const Environment env3(c);
    const auto [s3, task3] = env3.reset(0);
    CHECK(nf_select_action(sg, g, task3.initial, task3.goal, p, c.extent(), rng).fallback == NfFallback::bind_fail);
}

TEST_CASE("rollout moves the picked entity along a matching edge") {
    const TransitionGraph g = square_graph();
    const RolloutModel model{&g, 0.05};
    const std::vector<int> nodes{0, 1};

    auto mv = rollout_move(model, nodes, {{0.1, 0.1}, {0.0, 0.4}});
    CHECK(mv.entity == 0);
    CHECK(mv.target == 2);
    // destination nearer the source than any edge target: no move
    CHECK(rollout_move(model, nodes, {{0.1, 0.1}, {0.01, 0.0}}).entity == -1);
    // pick misses every stored pick point
    CHECK(rollout_move(model, nodes, {{0.3, 0.3}, {0.2, 0.2}}).entity == -1);
    // target occupied by the other entity
    CHECK(rollout_move(model, nodes, {{0.1, 0.1}, {0.4, 0.0}}).entity == -1);

    const auto next = rollout(model, {Vec2{0.1, 0.1}, Vec2{0.5, 0.1}}, {{0.5, 0.1}, {0.0, 0.4}});
    CHECK(std::get<Vec2>(next[0]) == Vec2{0.1, 0.1});
    CHECK(std::get<Vec2>(next[1]) == Vec2{0.5, 0.5});
}

TEST_CASE("plan cost counts aligned squared distances after the rollout") {
    const TransitionGraph g = square_graph();
    const RolloutModel model{&g, 0.05};
    const EntitySet cur{at({0.1, 0.1})};
    const EntitySet goal{at({0.5, 0.5})};
    CHECK(plan_cost(model, cur, goal, {}) == doctest::Approx(0.32));
    CHECK(plan_cost(model, cur, goal, {{{0.1, 0.1}, {0.4, 0.4}}}) == doctest::Approx(0));
    CHECK(plan_cost(model, cur, goal, {{{0.1, 0.1}, {0.4, 0.0}}}) == doctest::Approx(0.16));
}

TEST_CASE("cem never loses its best plan and finds a one-step solution") {
    const TransitionGraph g = square_graph();
    const RolloutModel model{&g, 0.05};
    EntitySet cur{at({0.1, 0.1}), at({0.5, 0.1})};
    EntitySet goal{at({0.5, 0.5}), at({0.5, 0.1})};
    goal[1].type[0] = cur[1].type[0] = 1.0;
    CemParams params;
    params.horizon = 2;
    Rng rng(9);
    const CemResult r = cem_plan(model, cur, goal, params, {0.6, 0.6}, rng);
    REQUIRE(r.best_cost.size() == 10);
    for (std::size_t i = 1; i < r.best_cost.size(); ++i) CHECK(r.best_cost[i] <= r.best_cost[i - 1]);
    CHECK(r.best_cost.back() == doctest::Approx(0));

    CemParams bad;
    bad.population = 20;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
