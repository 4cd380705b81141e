#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "rearrange/env.hpp"
#include "rearrange/keyvalue.hpp"
#include "rearrange/raster.hpp"

using namespace rearrange;

namespace {

EnvConfig grid(int side, int k) {
    EnvConfig c = EnvConfig::grid_defaults();
    c.grid_side = side;
    c.object_count = k;
    return c;
}

EnvState place(const Environment& env, const std::vector<int>& cells) {
    const Color palette[] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}};
    EnvState s;
    for (std::size_t i = 0; i < cells.size(); ++i) s.objects.push_back({palette[i], Shape::square, env.cell_center(cells[i])});
    return s;
}

}  // namespace

TEST_CASE("grid cell centres sit at ((i + 0.5) / 4, (j + 0.5) / 4)") {
    const Environment env(grid(4, 4));
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) {
            const int cell = j * 4 + i;
            CHECK(env.cell_center(cell).x == doctest::Approx((i + 0.5) / 4));
            CHECK(env.cell_center(cell).y == doctest::Approx((j + 0.5) / 4));
            CHECK(env.cell_of(env.cell_center(cell)) == cell);
        }
    }
    CHECK(env.cell_of({-3, 7}) == 12);
}

TEST_CASE("grid reset") {
    const Environment env(grid(4, 5));
    const auto [s, task] = env.reset(11);
    const auto [s2, task2] = env.reset(11);
    CHECK(s == s2);
    CHECK(task == task2);
    CHECK(env.reset(12).first != s);

    REQUIRE(s.objects.size() == 5);
    REQUIRE(task.constrained_ids.size() == 5);
    std::set<int> initial, goal;
    for (const auto& o : s.objects) initial.insert(env.cell_of(o.position));
    for (const auto& g : task.goal_positions) goal.insert(env.cell_of(g));
    CHECK(initial.size() == 5);
    CHECK(goal.size() == 5);
    for (int c : goal) CHECK(initial.count(c) == 0);
    CHECK(env.unsatisfied_count(s, task) == 5);
    CHECK(task.initial == env.render(s));
}

TEST_CASE("grid reset rejects more objects than disjoint cells allow") {
    CHECK_THROWS_AS(Environment(grid(3, 5)).reset(0), ConfigError);
    CHECK_NOTHROW(Environment(grid(4, 8)).reset(0));
}

TEST_CASE("partial grid tasks constrain a uniform nonempty subset") {
    const int k = 4;
    // oracle: expected share of constrained objects over all 2^k - 1 subsets
    int members = 0, subsets = 0;
    for (int mask = 1; mask < (1 << k); ++mask, ++subsets)
        for (int i = 0; i < k; ++i) members += mask >> i & 1;
    const double expected = static_cast<double>(members) / (subsets * k);

    const Environment env(grid(4, k));
    int constrained = 0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        const auto task = env.reset(static_cast<std::uint64_t>(t), Setting::partial).second;
        CHECK(!task.constrained_ids.empty());
        constrained += static_cast<int>(task.constrained_ids.size());
    }
    CHECK(static_cast<double>(constrained) / (trials * k) == doctest::Approx(expected).epsilon(0.04));
}

TEST_CASE("partial goal rasters show only constrained objects") {
    const Environment env(grid(4, 4));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [s, task] = env.reset(seed, Setting::partial);
        CHECK(env.goal_state(s, task).objects.size() == task.constrained_ids.size());
    }
}

TEST_CASE("grid step semantics, exhaustive on a 2x2 grid") {
    const Environment env(grid(2, 2));
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            if (a == b) continue;
            const EnvState s = place(env, {a, b});
            for (int mover = 0; mover < 2; ++mover) {
                for (int dest = 0; dest < 4; ++dest) {
                    const Vec2 w = s.objects[mover].position;
                    const auto out = env.step_detailed(s, {w, env.cell_center(dest) - w});
                    const int other = mover == 0 ? b : a;
                    const int from = mover == 0 ? a : b;
                    EnvState expected = s;
                    expected.step_count = 1;
                    if (dest != other && dest != from) expected.objects[mover].position = env.cell_center(dest);
                    CHECK(out.state == expected);
                    CHECK(out.moved.has_value() == (dest != other && dest != from));
                }
            }
            // a pick far from both objects is a no-op
            const auto none = env.step_detailed(s, {{-1, -1}, {0.5, 0.5}});
            CHECK(!none.moved);
            CHECK(none.state.objects == s.objects);
        }
    }
}

TEST_CASE("pick takes the nearest object within the threshold, lowest index on ties") {
    const Environment env(grid(4, 2));
    const EnvState s = place(env, {0, 1});
    CHECK(env.pick(s, {0.125, 0.125}) == 0);
    CHECK(env.pick(s, {0.25, 0.125}) == 0);  // equidistant
    CHECK(env.pick(s, {0.26, 0.125}) == 1);
    CHECK(!env.pick(s, {0.125, 0.26}));
}

TEST_CASE("grid snapping puts off-centre drops at the cell centre") {
    const Environment env(grid(4, 1));
    const EnvState s = place(env, {0});
    const EnvState t = env.step(s, {{0.1, 0.1}, {0.5, 0.3}});
    CHECK(t.objects[0].position == env.cell_center(env.cell_of({0.6, 0.4})));
}

TEST_CASE("grid render is injective over placements on a 3x3 grid") {
    const Environment env(grid(3, 2));
    std::set<std::vector<std::uint8_t>> seen;
    int states = 0;
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b)
            if (a != b) {
                seen.insert(env.render(place(env, {a, b})).pixels);
                ++states;
            }
    CHECK(static_cast<int>(seen.size()) == states);
}

TEST_CASE("table reset keeps objects apart and on the table") {
    EnvConfig c = EnvConfig::table_defaults();
    c.object_count = 7;
    const Environment env(c);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (Setting setting : {Setting::complete, Setting::partial}) {
            const auto [s, task] = env.reset(seed, setting);
            std::vector<Vec2> points;
            std::set<Color> colors;
            for (const auto& o : s.objects) {
                points.push_back(o.position);
                colors.insert(o.color);
                CHECK(o.position.x >= c.footprint_radius);
                CHECK(o.position.x <= c.table_width - c.footprint_radius);
                CHECK(o.position.y >= c.footprint_radius);
                CHECK(o.position.y <= c.table_height - c.footprint_radius);
            }
            CHECK(colors.size() == 7);
            for (const auto& g : task.goal_positions) points.push_back(g);
            for (std::size_t i = 0; i < points.size(); ++i)
                for (std::size_t j = i + 1; j < points.size(); ++j) CHECK(distance(points[i], points[j]) >= c.min_separation);
            CHECK(task.constrained_ids.size() == (setting == Setting::complete ? 7u : 4u));
            CHECK(env.unsatisfied_count(s, task) == static_cast<int>(task.constrained_ids.size()));
        }
    }
}

TEST_CASE("table step clamps to the table and refuses crowded drops") {
    EnvConfig c = EnvConfig::table_defaults();
    c.object_count = 2;
    const Environment env(c);
    EnvState s;
    s.objects.push_back({{1, 0, 0}, Shape::disc, {0.2, 0.2}});
    s.objects.push_back({{0, 1, 0}, Shape::square, {0.4, 0.4}});
    const EnvState clamped = env.step(s, {{0.2, 0.2}, {5, -5}});
    CHECK(clamped.objects[0].position == Vec2{c.table_width - c.footprint_radius, c.footprint_radius});
    const EnvState blocked = env.step(s, {{0.2, 0.2}, {0.15, 0.15}});
    CHECK(blocked.objects == s.objects);
    CHECK(blocked.step_count == 1);
}

TEST_CASE("table shapes render distinctly") {
    EnvConfig c = EnvConfig::table_defaults();
    const Environment env(c);
    std::set<std::vector<std::uint8_t>> seen;
    for (Shape shape : {Shape::square, Shape::disc, Shape::triangle}) {
        EnvState s;
        s.objects.push_back({{1, 1, 1}, shape, {0.3, 0.4}});
        seen.insert(env.render(s).pixels);
    }
    CHECK(seen.size() == 3);
}

TEST_CASE("raster round trip and format errors") {
    Raster r(3, 2);
    r.set(2, 1, {1, 2, 3});
    std::stringstream ss;
    write_raster(ss, r);
    CHECK(read_raster(ss) == r);
    CHECK(ss.str().substr(0, 4) == "NCSR");

    std::stringstream bad("NCSX\x03\0\0\0");
    CHECK_THROWS_AS(read_raster(bad), FormatError);
    std::string truncated;
    {
        std::stringstream full;
        write_raster(full, r);
        truncated = full.str().substr(0, 14);
    }
    std::stringstream t(truncated);
    CHECK_THROWS_AS(read_raster(t), FormatError);
}

TEST_CASE("env config key-value round trip") {
    EnvConfig c = EnvConfig::table_defaults();
    c.object_count = 6;
    const EnvConfig back = env_config_from_text(format_key_values(env_config_to_kv(c)));
    CHECK(format_key_values(env_config_to_kv(back)) == format_key_values(env_config_to_kv(c)));
    CHECK_THROWS_AS(env_config_from_text("variant = grid\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(env_config_from_text("object_count = 0\n"), ConfigError);
}
