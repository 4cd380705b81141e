#include "rearrange/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rearrange {

namespace {

// Shortest augmenting path Hungarian method (potentials form), n <= m.
std::vector<int> hungarian(const std::vector<double>& a, int n, int m) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> p(m + 1, 0), way(m + 1, 0);
    const auto cost = [&](int i, int j) { return a[static_cast<std::size_t>(i - 1) * m + (j - 1)]; };
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= m; ++j)
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace

std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols) {
    if (rows < 0 || cols < 0 || cost.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("cost matrix shape mismatch");
    if (rows == 0) return {};
    if (cols == 0) return std::vector<int>(rows, -1);
    for (double c : cost)
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite assignment cost");
    if (rows <= cols) return hungarian(cost, rows, cols);

    std::vector<double> t(cost.size());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) t[static_cast<std::size_t>(c) * rows + r] = cost[static_cast<std::size_t>(r) * cols + c];
    const auto col_to_row = hungarian(t, cols, rows);
    std::vector<int> row_to_col(rows, -1);
    for (int c = 0; c < cols; ++c) row_to_col[col_to_row[c]] = c;
    return row_to_col;
}

Alignment align(const EntitySet& current, const EntitySet& goal) {
    if (goal.empty()) throw std::invalid_argument("align: empty goal set");
    const int g = static_cast<int>(goal.size());
    const int c = static_cast<int>(current.size());
    std::vector<double> cost(static_cast<std::size_t>(g) * c);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < c; ++j) cost[static_cast<std::size_t>(i) * c + j] = type_distance(goal[i].type, current[j].type);

    Alignment out;
    out.goal_to_current = solve_assignment(cost, g, c);
    std::vector<char> taken(c, 0);
    for (int i = 0; i < g; ++i) {
        const int j = out.goal_to_current[i];
        if (j < 0) continue;
        taken[j] = 1;
        out.total_cost += cost[static_cast<std::size_t>(i) * c + j];
    }
    for (int j = 0; j < c; ++j)
        if (!taken[j]) out.unmatched_current.push_back(j);

    // equal-cost swaps or substitutions mean the matching is not unique
    constexpr double eps = 1e-12;
    const auto at = [&](int i, int j) { return cost[static_cast<std::size_t>(i) * c + j]; };
    for (int i1 = 0; i1 < g && !out.degenerate; ++i1) {
        const int j1 = out.goal_to_current[i1];
        if (j1 < 0) continue;
        for (int i2 = i1 + 1; i2 < g && !out.degenerate; ++i2) {
            const int j2 = out.goal_to_current[i2];
            if (j2 < 0) continue;
            if (std::abs(at(i1, j2) + at(i2, j1) - at(i1, j1) - at(i2, j2)) <= eps) out.degenerate = true;
        }
        for (int j : out.unmatched_current)
            if (std::abs(at(i1, j) - at(i1, j1)) <= eps) out.degenerate = true;
    }
    return out;
}

}  // namespace rearrange
