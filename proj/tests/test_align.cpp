#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include "rearrange/align.hpp"
#include "rearrange/random.hpp"

using namespace rearrange;

namespace {

// Brute force over every injection of the smaller side into the larger.
double brute_force(const std::vector<double>& cost, int rows, int cols) {
    const bool tall = rows > cols;
    const int small = tall ? cols : rows, large = tall ? rows : cols;
    std::vector<int> pick(large);
    std::iota(pick.begin(), pick.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double c = 0;
        for (int i = 0; i < small; ++i) c += tall ? cost[pick[i] * cols + i] : cost[i * cols + pick[i]];
        best = std::min(best, c);
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

Entity typed(double r, double g) {
    Entity e;
    e.type[0] = r;
    e.type[1] = g;
    e.state = Vec2{r, g};
    return e;
}

}  // namespace

TEST_CASE("assignment matches brute force on random rectangles") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = 1 + rng.below(5), cols = 1 + rng.below(5);
        std::vector<double> cost(rows * cols);
        for (auto& c : cost) c = std::round(rng.uniform() * 20) / 4;  // coarse values make ties common
        const auto assign = solve_assignment(cost, rows, cols);
        REQUIRE(static_cast<int>(assign.size()) == rows);
        double total = 0;
        std::vector<int> used;
        for (int r = 0; r < rows; ++r) {
            if (assign[r] < 0) continue;
            total += cost[r * cols + assign[r]];
            used.push_back(assign[r]);
        }
        std::sort(used.begin(), used.end());
        CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());
        CHECK(static_cast<int>(used.size()) == std::min(rows, cols));
        CHECK(total == doctest::Approx(brute_force(cost, rows, cols)));
    }
}

TEST_CASE("align pairs goal entities with the closest types") {
    const EntitySet current{typed(0, 0), typed(1, 0), typed(0, 1), typed(1, 1)};
    const EntitySet goal{typed(0.95, 0.95), typed(0.05, 0)};
    const Alignment a = align(current, goal);
    CHECK(a.goal_to_current == std::vector<int>{3, 0});
    CHECK(a.unmatched_current == std::vector<int>{1, 2});
    CHECK(!a.degenerate);
    CHECK_THROWS_AS(align(current, {}), std::invalid_argument);
}

TEST_CASE("identical types flag a degenerate alignment") {
    const EntitySet current{typed(0.5, 0.5), typed(0.5, 0.5)};
    const EntitySet goal{typed(0.5, 0.5), typed(0.5, 0.5)};
    CHECK(align(current, goal).degenerate);
}

TEST_CASE("more goal entities than current ones leave some unmatched") {
    const EntitySet current{typed(0, 0)};
    const EntitySet goal{typed(1, 1), typed(0, 0)};
    const Alignment a = align(current, goal);
    CHECK(a.goal_to_current == std::vector<int>{-1, 0});
}
