#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rearrange/env.hpp"
#include "rearrange/metric.hpp"
#include "rearrange/perception.hpp"

using namespace rearrange;

namespace {

void fill(Raster& r, int x0, int y0, int x1, int y1, Rgb8 c) {
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) r.set(x, y, c);
}

const Entity* with_color(const EntitySet& s, double r, double g, double b) {
    for (const auto& e : s)
        if (e.type[0] == r && e.type[1] == g && e.type[2] == b) return &e;
    return nullptr;
}

}  // namespace

TEST_CASE("one entity per 4-connected same-colour component") {
    Raster r(16, 16);
    fill(r, 2, 3, 5, 4, {255, 0, 0});
    fill(r, 10, 10, 10, 10, {0, 255, 0});
    fill(r, 11, 11, 11, 11, {0, 255, 0});  // touches only diagonally
    fill(r, 6, 3, 7, 4, {0, 0, 255});      // adjacent but a different colour
    const Perception p({RasterGeometry{16.0}, StateKind::position});
    const EntitySet s = p.perceive(r);
    CHECK(s.size() == 4);

    const Entity* red = with_color(s, 1, 0, 0);
    REQUIRE(red);
    CHECK(red->pixel_count == 8);
    // mean of pixel centres, in workspace units
    CHECK(std::get<Vec2>(red->state).x == doctest::Approx((3.5 + 0.5) / 16));
    CHECK(std::get<Vec2>(red->state).y == doctest::Approx((3.5 + 0.5) / 16));
}

TEST_CASE("first shape invariant of a w x h rectangle") {
    // closed form for a discrete rectangle: ((w^2 - 1) + (h^2 - 1)) / (12 w h)
    for (auto [w, h] : {std::pair{4, 2}, {3, 3}, {5, 1}, {7, 4}}) {
        Raster r(16, 16);
        fill(r, 1, 1, w, h, {9, 9, 9});
        const Entity e = Perception({RasterGeometry{16.0}, StateKind::position}).perceive(r).at(0);
        CHECK(e.type[3] == doctest::Approx(((w * w - 1) + (h * h - 1)) / (12.0 * w * h)));
    }
}

TEST_CASE("types ignore translation and 90 degree rotation") {
    const Perception p({RasterGeometry{32.0}, StateKind::mask});
    Raster a(32, 32), b(32, 32);
    fill(a, 2, 2, 7, 4, {10, 20, 30});
    fill(a, 3, 5, 4, 6, {10, 20, 30});  // an L shape
    // the same L, rotated a quarter turn and moved
    fill(b, 20, 20, 22, 25, {10, 20, 30});
    fill(b, 18, 21, 19, 22, {10, 20, 30});
    const auto ea = p.perceive(a), eb = p.perceive(b);
    REQUIRE(ea.size() == 1);
    REQUIRE(eb.size() == 1);
    CHECK(type_distance(ea[0].type, eb[0].type) < 1e-12);
}

TEST_CASE("grid scenes perceive as masks centred on their cells") {
    EnvConfig c = EnvConfig::grid_defaults();
    c.object_count = 6;
    const Environment env(c);
    const Perception p(PerceptionConfig::for_env(c));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = env.reset(seed).first;
        const auto ents = p.perceive(env.render(s));
        REQUIRE(ents.size() == s.objects.size());
        for (const auto& o : s.objects) {
            bool found = false;
            for (const auto& e : ents) {
                CHECK(std::holds_alternative<Mask>(e.state));
                found = found || distance(position_of(e.state, c.geometry()), o.position) < c.geometry().pixel_pitch();
            }
            CHECK(found);
        }
    }
}

TEST_CASE("table scenes perceive object centres within one pixel") {
    EnvConfig c = EnvConfig::table_defaults();
    c.object_count = 7;
    const Environment env(c);
    const Perception p(PerceptionConfig::for_env(c));
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = env.reset(seed).first;
        const auto ents = p.perceive(env.render(s));
        REQUIRE(ents.size() == s.objects.size());
        for (const auto& o : s.objects) {
            double best = 1e9;
            for (const auto& e : ents) best = std::min(best, distance(std::get<Vec2>(e.state), o.position));
            CHECK(best <= c.geometry().pixel_pitch());
        }
    }
}

TEST_CASE("filter criteria on a single move") {
    EnvConfig c = EnvConfig::grid_defaults();
    c.object_count = 4;
    const Environment env(c);
    const Perception p(PerceptionConfig::for_env(c));
    const auto s = env.reset(3).first;
    const Vec2 w = s.objects[2].position;
    const auto t = env.step(s, {w, Vec2{0.875, 0.875} - w});
    const auto before = p.perceive(env.render(s));
    const auto after = p.perceive(env.render(t));
    const CriteriaReport r = check_filter_criteria(before, after, MetricKind::cosine);
    CHECK(r.cardinality_match);
    REQUIRE(r.moved_index >= 0);
    CHECK(distance(before[r.moved_index].position, w) < c.geometry().pixel_pitch());
    CHECK(r.isolate_margin > 0);
    CHECK(r.max_type_drift < 1e-12);
    CHECK(r.max_state_drift == 0.0);

    const auto fewer = EntitySet(after.begin(), after.end() - 1);
    CHECK(!check_filter_criteria(before, fewer, MetricKind::cosine).cardinality_match);
    CHECK(CriteriaReport::csv_header().find("max_state_drift") != std::string::npos);
}
