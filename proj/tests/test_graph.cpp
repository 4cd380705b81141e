#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "rearrange/buffer.hpp"
#include "rearrange/graph.hpp"
#include "rearrange/harness.hpp"

using namespace rearrange;

namespace {

EnvConfig small_grid() {
    EnvConfig c = EnvConfig::grid_defaults();
    c.image_size = 32;
    return c;
}

const ExperienceBuffer& grid_buffer() {
    static const ExperienceBuffer b = generate_buffer(small_grid(), {300, 5, 7, true});
    return b;
}

Entity at(Vec2 p) {
    Entity e;
    e.state = p;
    e.position = p;
    return e;
}

}  // namespace

TEST_CASE("isolate picks the largest change") {
    const EntitySet before{at({0, 0}), at({1, 1}), at({2, 2})};
    const EntitySet after{at({0, 0.1}), at({1, 2}), at({2, 2})};
    const auto r = isolate(before, after, MetricKind::squared_euclidean);
    CHECK(r.index == 1);
    CHECK(r.margin == doctest::Approx(1.0 - 0.01));
    // ties go to the lowest index
    CHECK(isolate(before, before, MetricKind::squared_euclidean).index == 0);
    CHECK(isolate(before, before, MetricKind::squared_euclidean).margin == 0);
    CHECK_THROWS_AS(isolate(before, {}, MetricKind::squared_euclidean), std::invalid_argument);
    CHECK_THROWS_AS(isolate(before, EntitySet(2), MetricKind::squared_euclidean), std::invalid_argument);
}

TEST_CASE("buffer generation and serialisation") {
    const auto& b = grid_buffer();
    CHECK(b.episodes.size() == 300);
    CHECK(b.transition_count() == 1200);
    CHECK(grid_coverage_complete(b));
    for (const auto& ep : b.episodes) {
        CHECK(ep.observations.size() == 5);
        for (int m : ep.moved) CHECK(m >= 0);
    }

    std::stringstream ss;
    write_buffer(ss, b);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "NCSB");
    const ExperienceBuffer back = read_buffer(ss);
    CHECK(back.episodes.size() == b.episodes.size());
    CHECK(back.episodes[17].observations == b.episodes[17].observations);
    CHECK(back.episodes[17].actions == b.episodes[17].actions);
    CHECK(back.digest() == b.digest());

    const ExperienceBuffer again = generate_buffer(small_grid(), {300, 5, 7, true});
    CHECK(again.digest() == b.digest());
    CHECK(generate_buffer(small_grid(), {300, 5, 8, true}).digest() != b.digest());

    for (std::size_t cut : {std::size_t{3}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
        std::stringstream t(bytes.substr(0, cut));
        CHECK_THROWS_AS(read_buffer(t), FormatError);
    }
    std::string wrong_version = bytes;
    wrong_version[4] = 9;
    std::stringstream v(wrong_version);
    CHECK_THROWS_AS(read_buffer(v), FormatError);
}

TEST_CASE("prefix keeps leading episodes") {
    const auto& b = grid_buffer();
    CHECK(b.prefix(0.1).episodes.size() == 30);
    CHECK(b.prefix(1e-9).episodes.size() == 1);
    CHECK(b.prefix(1.0).episodes.size() == 300);
}

TEST_CASE("grid graph has one node per cell and full adjacency") {
    const auto& b = grid_buffer();
    const Perception p(PerceptionConfig::for_env(b.env));
    const auto [g, report] = build_graph(b, p, GraphConfig::defaults_for(Variant::grid));
    REQUIRE(g.node_count() == 16);
    const Environment env(b.env);
    // one edge per distinct (source cell, destination cell) pair in the data
    std::set<std::pair<int, int>> pairs;
    for (const auto& ep : b.episodes)
        for (const auto& a : ep.actions) pairs.insert({env.cell_of(a.w), env.cell_of(a.destination())});
    CHECK(g.edges().size() == pairs.size());
    for (const auto& [key, e] : g.edges())
        CHECK(pairs.count({env.cell_of(g.node_position(key.first)), env.cell_of(g.node_position(key.second))}) == 1);
    CHECK(report.transitions == 1200);
    CHECK(report.skipped_cardinality == 0);
    CHECK(report.dropped_self_loops == 0);
    CHECK(report.overwritten_edges == 1200 - pairs.size());
    CHECK(g.provenance.buffer_digest == b.digest());

    std::set<int> cells;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const Vec2 pos = g.node_position(static_cast<int>(i));
        const int cell = env.cell_of(pos);
        cells.insert(cell);
        CHECK(distance(pos, env.cell_center(cell)) < b.env.geometry().pixel_pitch());
    }
    CHECK(cells.size() == 16);

    // binding a perceived object finds the node of its cell
    const auto s = env.reset(1).first;
    for (const auto& e : p.perceive(env.render(s))) {
        const BindResult r = g.bind(e.state);
        CHECK(env.cell_of(g.node_position(r.node)) == env.cell_of(e.position));
        CHECK(r.distance < 1e-9);
    }
}

TEST_CASE("graph JSON round trip and format errors") {
    const auto& b = grid_buffer();
    const Perception p(PerceptionConfig::for_env(b.env));
    auto g = build_graph(b, p, GraphConfig::defaults_for(Variant::grid)).graph;
    g.provenance.config = "clusters = 16\n";
    std::stringstream ss;
    write_graph(ss, g);
    const std::string text = ss.str();
    const TransitionGraph back = read_graph(ss);
    CHECK(back == g);

    std::stringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_graph(truncated), FormatError);
    std::string other = text;
    other.replace(other.find("\"version\": 1"), 12, "\"version\": 7");
    std::stringstream versioned(other);
    CHECK_THROWS_AS(read_graph(versioned), FormatError);
    std::stringstream not_graph(R"({"format": "something-else", "version": 1})");
    CHECK_THROWS_AS(read_graph(not_graph), FormatError);
}

TEST_CASE("edge bookkeeping") {
    TransitionGraph g({{Vec2{0, 0}, 1}, {Vec2{1, 0}, 1}, {Vec2{0, 1}, 1}}, StateKind::position, {}, MetricKind::squared_euclidean,
                      MetricKind::squared_euclidean, MetricKind::squared_euclidean);
    CHECK_THROWS_AS(g.set_edge(1, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(g.set_edge(0, 3, {}), std::out_of_range);
    g.set_edge(0, 2, {{0, 0}, {0, 1}});
    g.set_edge(0, 1, {{0, 0}, {1, 0}});
    const auto out = g.out_edges(0);
    REQUIRE(out.size() == 2);
    CHECK(out[0]->to == 1);
    CHECK(out[1]->to == 2);
    CHECK(g.remove_edge(0, 1));
    CHECK(!g.edge(0, 1));
    // equidistant binding goes to the lower index
    CHECK(g.bind(Vec2{0.5, 0.5}).node == 0);
    CHECK(g.bind(Vec2{0.6, 0.6}).node == 1);
    CHECK_THROWS_AS(TransitionGraph().bind(Vec2{}), std::logic_error);
}

TEST_CASE("a buffer without moves yields no graph") {
    ExperienceBuffer b;
    b.env = small_grid();
    const Environment env(b.env);
    const auto s = env.reset(0).first;
    Episode ep;
    ep.observations = {env.render(s), env.render(s)};
    ep.actions = {Action{{-1, -1}, {0, 0}}};
    b.episodes.push_back(ep);
    CHECK_THROWS_AS(build_graph(b, Perception(PerceptionConfig::for_env(b.env)), GraphConfig::defaults_for(Variant::grid)),
                    std::runtime_error);
}
