#include "rearrange/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rearrange/random.hpp"

namespace rearrange {

std::string to_string(Variant v) { return v == Variant::grid ? "grid" : "table"; }

std::string to_string(Shape s) {
    switch (s) {
        case Shape::square: return "square";
        case Shape::disc: return "disc";
        case Shape::triangle: return "triangle";
    }
    return "?";
}

std::string to_string(Setting s) { return s == Setting::complete ? "complete" : "partial"; }

Variant parse_variant(const std::string& s) {
    if (s == "grid") return Variant::grid;
    if (s == "table") return Variant::table;
    throw ConfigError("unknown variant '" + s + "'");
}

Setting parse_setting(const std::string& s) {
    if (s == "complete") return Setting::complete;
    if (s == "partial") return Setting::partial;
    throw ConfigError("unknown setting '" + s + "'");
}

EnvConfig EnvConfig::grid_defaults() { return EnvConfig{}; }

EnvConfig EnvConfig::table_defaults() {
    EnvConfig c;
    c.variant = Variant::table;
    c.pick_threshold = 0.05;
    c.place_threshold = 0.05;
    return c;
}

void EnvConfig::validate() const {
    if (object_count < 1) throw ConfigError("object_count must be positive");
    if (!(pick_threshold > 0) || !(place_threshold > 0)) throw ConfigError("thresholds must be positive");
    if (variant == Variant::grid) {
        if (grid_side < 1) throw ConfigError("grid_side must be positive");
        if (location_count() < object_count) throw ConfigError("more objects than grid locations");
        if (image_size < 4 * grid_side) throw ConfigError("image_size must be at least 4 x grid_side");
    } else {
        if (!(table_width > 0) || !(table_height > 0)) throw ConfigError("table extent must be positive");
        if (palette_size < 1 || palette_size > static_cast<int>(table_palette().size()))
            throw ConfigError("palette_size out of range");
        if (object_count > palette_size) throw ConfigError("more objects than palette colours");
        if (!(footprint_radius > 0) || min_separation < 2 * footprint_radius)
            throw ConfigError("min_separation must cover two footprints");
        if (image_size < 16) throw ConfigError("image_size too small");
    }
}

Vec2 EnvConfig::extent() const {
    return variant == Variant::grid ? Vec2{1.0, 1.0} : Vec2{table_width, table_height};
}

RasterGeometry EnvConfig::geometry() const {
    if (variant == Variant::grid) {
        const int cell_px = image_size / grid_side;
        return {static_cast<double>(cell_px * grid_side)};
    }
    return {image_size / std::max(table_width, table_height)};
}

const std::vector<Color>& table_palette() {
    static const std::vector<Color> palette = {
        {1.0, 0.0, 0.0}, {0.0, 0.8, 0.0}, {0.0, 0.0, 1.0}, {1.0, 1.0, 0.0}, {0.0, 1.0, 1.0},
        {1.0, 0.0, 1.0}, {1.0, 0.5, 0.0}, {0.5, 0.0, 1.0}, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.5},
        {0.6, 0.3, 0.1}, {1.0, 0.6, 0.8}, {0.5, 1.0, 0.5},
    };
    return palette;
}

Environment::Environment(EnvConfig config) : config_(config) { config_.validate(); }

Vec2 Environment::cell_center(int cell) const {
    const int side = config_.grid_side;
    return {(cell % side + 0.5) / side, (cell / side + 0.5) / side};
}

int Environment::cell_of(Vec2 p) const {
    const int side = config_.grid_side;
    const auto axis = [side](double v) {
        return std::clamp(static_cast<int>(std::floor(v * side)), 0, side - 1);
    };
    // floor of NaN is undefined behaviour for the int cast; treat as cell 0
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return 0;
    return axis(p.y) * side + axis(p.x);
}

Vec2 Environment::clamp_to_table(Vec2 p) const {
    const double r = config_.footprint_radius;
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return {r, r};
    return {std::clamp(p.x, r, config_.table_width - r), std::clamp(p.y, r, config_.table_height - r)};
}

namespace {

double color_distance(const Color& a, const Color& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

// Grid colours: uniform RGB, at least 0.25 apart from each other and from the black background.
std::vector<Color> sample_grid_colors(int k, Rng& rng) {
    constexpr double min_gap = 0.25;
    std::vector<Color> colors;
    const Color black{0, 0, 0};
    for (int attempts = 0; static_cast<int>(colors.size()) < k; ++attempts) {
        if (attempts > 100000) throw ConfigError("cannot sample distinguishable colours");
        Color c{rng.uniform(), rng.uniform(), rng.uniform()};
        if (color_distance(c, black) < min_gap) continue;
        bool ok = true;
        for (const auto& o : colors) ok = ok && color_distance(c, o) >= min_gap;
        if (ok) colors.push_back(c);
    }
    return colors;
}

}  // namespace

std::pair<EnvState, Task> Environment::reset(std::uint64_t seed, Setting setting) const {
    Rng rng(derive_seed(seed, "env.reset"));
    const int k = config_.object_count;
    EnvState state;
    Task task;
    task.setting = setting;

    if (config_.variant == Variant::grid) {
        const int cells = config_.location_count();
        if (2 * k > cells)
            throw ConfigError("initial and goal cells cannot be disjoint: " + std::to_string(k) + " objects on " +
                              std::to_string(cells) + " cells");
        const auto colors = sample_grid_colors(k, rng);
        std::vector<int> order(cells);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (int i = 0; i < k; ++i) state.objects.push_back({colors[i], Shape::square, cell_center(order[i])});

        std::vector<int> constrained;
        if (setting == Setting::complete) {
            constrained.resize(k);
            std::iota(constrained.begin(), constrained.end(), 0);
        } else {
            // uniform over the 2^k - 1 nonempty subsets
            const std::uint64_t mask = 1 + rng.below((std::uint64_t{1} << k) - 1);
            for (int i = 0; i < k; ++i)
                if (mask >> i & 1) constrained.push_back(i);
        }
        for (std::size_t c = 0; c < constrained.size(); ++c) {
            task.constrained_ids.push_back(constrained[c]);
            task.goal_positions.push_back(cell_center(order[k + static_cast<int>(c)]));
        }
    } else {
        const Vec2 lo{config_.footprint_radius, config_.footprint_radius};
        const Vec2 hi = Vec2{config_.table_width, config_.table_height} - lo;
        std::vector<Vec2> placed;
        const auto sample_free = [&]() {
            for (int attempts = 0; attempts < 100000; ++attempts) {
                const Vec2 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
                bool ok = true;
                for (const auto& q : placed) ok = ok && distance(p, q) >= config_.min_separation;
                if (ok) {
                    placed.push_back(p);
                    return p;
                }
            }
            throw ConfigError("cannot place objects without overlap; table too crowded");
        };

        std::vector<int> colors(config_.palette_size);
        std::iota(colors.begin(), colors.end(), 0);
        rng.shuffle(colors);
        for (int i = 0; i < k; ++i) {
            const auto shape = static_cast<Shape>(rng.below(3));
            state.objects.push_back({table_palette()[colors[i]], shape, sample_free()});
        }

        std::vector<int> ids(k);
        std::iota(ids.begin(), ids.end(), 0);
        if (setting == Setting::partial) {
            rng.shuffle(ids);
            ids.resize(std::min(4, k));
            std::sort(ids.begin(), ids.end());
        }
        for (int id : ids) {
            task.constrained_ids.push_back(id);
            task.goal_positions.push_back(sample_free());
        }
    }

    task.initial = render(state);
    task.goal = render(goal_state(state, task));
    return {std::move(state), std::move(task)};
}

EnvState Environment::goal_state(const EnvState& initial, const Task& task) const {
    EnvState goal;
    for (std::size_t c = 0; c < task.constrained_ids.size(); ++c) {
        auto obj = initial.objects.at(task.constrained_ids[c]);
        obj.position = task.goal_positions[c];
        goal.objects.push_back(obj);
    }
    return goal;
}

std::optional<int> Environment::pick(const EnvState& state, Vec2 w) const {
    std::optional<int> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        const double d = distance(state.objects[i].position, w);
        if (!(d <= config_.pick_threshold)) continue;
        // strict < keeps the lowest index on exact ties
        if (!best || d < best_d) {
            best = static_cast<int>(i);
            best_d = d;
        }
    }
    return best;
}

bool Environment::blocked(const EnvState& state, int mover, Vec2 dest) const {
    for (std::size_t i = 0; i < state.objects.size(); ++i) {
        if (static_cast<int>(i) == mover) continue;
        const Vec2 p = state.objects[i].position;
        if (config_.variant == Variant::grid) {
            if (cell_of(p) == cell_of(dest)) return true;
        } else if (distance(p, dest) < config_.min_separation) {
            return true;
        }
    }
    return false;
}

StepOutcome Environment::step_detailed(const EnvState& state, const Action& action) const {
    StepOutcome out{state, std::nullopt};
    out.state.step_count += 1;
    const auto picked = pick(state, action.w);
    if (!picked) return out;
    const Vec2 target = action.destination();
    const Vec2 dest = config_.variant == Variant::grid ? snap(target) : clamp_to_table(target);
    if (blocked(state, *picked, dest)) return out;
    auto& pos = out.state.objects[*picked].position;
    if (pos != dest) {
        pos = dest;
        out.moved = *picked;
    }
    return out;
}

namespace {

std::uint8_t to_byte(double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); }

bool inside_shape(Shape shape, double dx, double dy, double r) {
    switch (shape) {
        case Shape::disc: return dx * dx + dy * dy <= r * r;
        case Shape::square: {
            const double h = r * 0.886227;  // equal area with the disc
            return std::abs(dx) <= h && std::abs(dy) <= h;
        }
        case Shape::triangle: {
            // equilateral, apex towards -y, circumradius 1.3 r
            const double rho = 1.3 * r;
            const double s3 = std::sqrt(3.0);
            if (dy > rho / 2) return false;
            // edges through the apex (0, -rho) and base corners (+-rho*s3/2, rho/2)
            return s3 * std::abs(dx) <= dy + rho;
        }
    }
    return false;
}

}  // namespace

Raster Environment::render(const EnvState& state) const {
    const auto n = static_cast<std::uint32_t>(config_.image_size);
    Raster raster(n, n);
    const RasterGeometry geo = config_.geometry();
    for (const auto& obj : state.objects) {
        const Rgb8 rgb{to_byte(obj.color[0]), to_byte(obj.color[1]), to_byte(obj.color[2])};
        if (config_.variant == Variant::grid) {
            const int cell_px = config_.image_size / config_.grid_side;
            const int margin = std::max(1, cell_px / 8);
            const int cell = cell_of(obj.position);
            const int x0 = (cell % config_.grid_side) * cell_px;
            const int y0 = (cell / config_.grid_side) * cell_px;
            for (int y = y0 + margin; y < y0 + cell_px - margin; ++y)
                for (int x = x0 + margin; x < x0 + cell_px - margin; ++x)
                    raster.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), rgb);
        } else {
            const double s = geo.pixels_per_unit;
            const double cx = obj.position.x * s;
            const double cy = obj.position.y * s;
            const double r = config_.footprint_radius * s;
            const int reach = static_cast<int>(std::ceil(1.5 * r)) + 1;
            for (int y = static_cast<int>(cy) - reach; y <= static_cast<int>(cy) + reach; ++y) {
                for (int x = static_cast<int>(cx) - reach; x <= static_cast<int>(cx) + reach; ++x) {
                    if (x < 0 || y < 0 || x >= static_cast<int>(n) || y >= static_cast<int>(n)) continue;
                    if (inside_shape(obj.shape, x + 0.5 - cx, y + 0.5 - cy, r))
                        raster.set(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y), rgb);
                }
            }
        }
    }
    return raster;
}

int Environment::unsatisfied_count(const EnvState& state, const Task& task) const {
    int count = 0;
    for (std::size_t c = 0; c < task.constrained_ids.size(); ++c) {
        const Vec2 p = state.objects.at(task.constrained_ids[c]).position;
        if (distance(p, task.goal_positions[c]) > config_.place_threshold) ++count;
    }
    return count;
}

}  // namespace rearrange
