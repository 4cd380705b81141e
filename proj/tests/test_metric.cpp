#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rearrange/metric.hpp"

using namespace rearrange;

namespace {

Mask mask_of(int w, int h, std::initializer_list<int> bits) {
    Mask m(w, h);
    for (int b : bits) m.set(b);
    return m;
}

}  // namespace

TEST_CASE("position metrics") {
    const State a = Vec2{3, 4}, b = Vec2{6, 8}, c = Vec2{4, -3};
    CHECK(distance(MetricKind::squared_euclidean, a, b) == doctest::Approx(25));
    CHECK(distance(MetricKind::cosine, a, b) == doctest::Approx(0).epsilon(1e-12));
    CHECK(distance(MetricKind::cosine, a, c) == doctest::Approx(1));
    CHECK(distance(MetricKind::cosine, State{Vec2{}}, State{Vec2{}}) == 0);
    CHECK(distance(MetricKind::cosine, State{Vec2{}}, a) == 1);
    CHECK_THROWS_AS(distance(MetricKind::iou, a, b), std::invalid_argument);
}

TEST_CASE("mask metrics against hand counts") {
    // |a| = 3, |b| = 2, |a & b| = 1
    const State a = mask_of(8, 8, {0, 1, 2}), b = mask_of(8, 8, {2, 63});
    CHECK(distance(MetricKind::iou, a, b) == doctest::Approx(1.0 - 1.0 / 4));
    CHECK(distance(MetricKind::cosine, a, b) == doctest::Approx(1.0 - 1.0 / std::sqrt(6.0)));
    CHECK(distance(MetricKind::squared_euclidean, a, b) == doctest::Approx(3));
    CHECK(distance(MetricKind::iou, a, a) == 0);
    CHECK_THROWS_AS(distance(MetricKind::iou, a, State{mask_of(4, 4, {0})}), std::invalid_argument);
    CHECK_THROWS_AS(distance(MetricKind::iou, a, State{Vec2{}}), std::invalid_argument);
}

TEST_CASE("mask against mean-mask centroid") {
    // centroid values: pixel 0 -> 1.0, pixel 1 -> 0.5, pixel 2 -> 0.25
    std::vector<double> v(16, 0.0);
    v[0] = 1.0;
    v[1] = 0.5;
    v[2] = 0.25;
    const Centroid c = MeanMask::from_values(4, 4, v);
    const State a = mask_of(4, 4, {0, 2});
    const double norm2 = 1.0 + 0.25 + 0.0625;
    CHECK(distance(MetricKind::squared_euclidean, a, c) == doctest::Approx(norm2 + 2 - 2 * 1.25));
    CHECK(distance(MetricKind::cosine, a, c) == doctest::Approx(1 - 1.25 / std::sqrt(2 * norm2)));
    // thresholded centroid is {0, 1}: intersection 1, union 3
    CHECK(distance(MetricKind::iou, a, c) == doctest::Approx(1 - 1.0 / 3));
    CHECK(std::get<Mask>(to_state(c)) == mask_of(4, 4, {0, 1}));
}

TEST_CASE("state and centroid conversions agree") {
    const State a = mask_of(4, 4, {5, 6});
    for (MetricKind m : {MetricKind::cosine, MetricKind::iou, MetricKind::squared_euclidean})
        CHECK(distance(m, a, to_centroid(a)) == doctest::Approx(0).epsilon(1e-12));
    const RasterGeometry geo{4.0};
    CHECK(position_of(a, geo).x == doctest::Approx(2.0 / 4));
    CHECK(position_of(a, geo).y == doctest::Approx(1.5 / 4));
    CHECK(position_of(to_centroid(a), geo) == position_of(a, geo));
}

TEST_CASE("metric names") {
    for (MetricKind m : {MetricKind::cosine, MetricKind::iou, MetricKind::squared_euclidean})
        CHECK(parse_metric(to_string(m)) == m);
    CHECK_THROWS_AS(parse_metric("manhattan"), ConfigError);
}
