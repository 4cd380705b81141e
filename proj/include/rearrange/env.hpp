#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rearrange/core.hpp"
#include "rearrange/raster.hpp"

namespace rearrange {

enum class Variant { grid, table };
enum class Shape : std::uint8_t { square, disc, triangle };
enum class Setting { complete, partial };

std::string to_string(Variant v);
std::string to_string(Shape s);
std::string to_string(Setting s);
Variant parse_variant(const std::string& s);
Setting parse_setting(const std::string& s);

/// Simulator parameters. Distances are in workspace units; the grid variant
/// spans the unit square, the table variant spans table_width x table_height.
struct EnvConfig {
    Variant variant = Variant::grid;
    int grid_side = 4;
    double table_width = 0.6;
    double table_height = 0.8;
    int object_count = 4;
    int image_size = 64;
    double pick_threshold = 0.125;
    double place_threshold = 0.125;
    int palette_size = 13;
    // table only: object footprint radius and minimum centre spacing
    double footprint_radius = 0.04;
    double min_separation = 0.1;

    static EnvConfig grid_defaults();
    static EnvConfig table_defaults();

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    Vec2 extent() const;
    int location_count() const { return grid_side * grid_side; }
    RasterGeometry geometry() const;
};

using Color = std::array<double, 3>;

struct ObjectSpec {
    Color color{};
    Shape shape = Shape::square;
    Vec2 position;

    bool operator==(const ObjectSpec&) const = default;
};

struct EnvState {
    std::vector<ObjectSpec> objects;
    std::uint64_t step_count = 0;

    bool operator==(const EnvState&) const = default;
};

/// A rearrangement problem. `constrained_ids` and `goal_positions` are
/// ground truth for scoring and must not be shown to a policy.
struct Task {
    Raster initial;
    Raster goal;
    std::vector<int> constrained_ids;
    std::vector<Vec2> goal_positions;  // parallel to constrained_ids
    Setting setting = Setting::complete;

    bool operator==(const Task&) const = default;
};

struct StepOutcome {
    EnvState state;
    std::optional<int> moved;  // index of the object whose position changed
};

/// The fixed 13-colour table palette.
const std::vector<Color>& table_palette();

class Environment {
public:
    explicit Environment(EnvConfig config);

    const EnvConfig& config() const { return config_; }

    /// Samples initial placements, appearances and goals. Deterministic in
    /// (config, seed, setting).
    std::pair<EnvState, Task> reset(std::uint64_t seed, Setting setting = Setting::complete) const;

    EnvState step(const EnvState& state, const Action& action) const { return step_detailed(state, action).state; }
    StepOutcome step_detailed(const EnvState& state, const Action& action) const;

    Raster render(const EnvState& state) const;

    int unsatisfied_count(const EnvState& state, const Task& task) const;

    /// Index of the object `w` would pick, if any.
    std::optional<int> pick(const EnvState& state, Vec2 w) const;

    // grid helpers
    Vec2 cell_center(int cell) const;
    int cell_of(Vec2 p) const;
    Vec2 snap(Vec2 p) const { return cell_center(cell_of(p)); }

    /// Builds the goal-image state: constrained objects at their goal positions.
    EnvState goal_state(const EnvState& initial, const Task& task) const;

private:
    Vec2 clamp_to_table(Vec2 p) const;
    bool blocked(const EnvState& state, int mover, Vec2 dest) const;

    EnvConfig config_;
};

}  // namespace rearrange
