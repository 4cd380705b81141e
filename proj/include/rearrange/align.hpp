#pragma once

#include <vector>

#include "rearrange/perception.hpp"

namespace rearrange {

/// Minimum-cost assignment of rows to distinct columns.
///
/// `cost` is row-major with `rows` x `cols` entries. When rows <= cols every
/// row is assigned; otherwise every column is, and the surplus rows get -1.
/// Returns the column chosen for each row.
std::vector<int> solve_assignment(const std::vector<double>& cost, int rows, int cols);

/// Result of matching goal constraints to current entities by type.
struct Alignment {
    std::vector<int> goal_to_current;  // -1 when a goal entity has no partner
    std::vector<int> unmatched_current;
    double total_cost = 0.0;
    bool degenerate = false;  // an alternative matching has equal cost
};

/// Hungarian matching on Euclidean type-vector distance. Throws
/// std::invalid_argument if `goal` is empty.
Alignment align(const EntitySet& current, const EntitySet& goal);

}  // namespace rearrange
