#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rearrange/env.hpp"
#include "rearrange/metric.hpp"
#include "rearrange/raster.hpp"

namespace rearrange {

/// Appearance descriptor: mean RGB followed by four rotation-invariant
/// combinations of scale-normalised central moments.
constexpr std::size_t kTypeDim = 7;
using TypeVec = std::array<double, kTypeDim>;

double type_distance(const TypeVec& a, const TypeVec& b);

enum class StateKind { position, mask };

std::string to_string(StateKind k);
StateKind parse_state_kind(const std::string& s);

/// One inferred object: action-invariant type plus action-dependent state.
/// `position` is the blob centroid in workspace units and is kept
/// regardless of the active state representation, for targeting actions.
struct Entity {
    TypeVec type{};
    State state;
    Vec2 position;
    int pixel_count = 0;
};

/// Unordered: indices carry no meaning.
using EntitySet = std::vector<Entity>;

struct PerceptionConfig {
    RasterGeometry geometry;
    StateKind state_kind = StateKind::mask;

    /// Masks for the grid variant, positions for the table variant.
    static PerceptionConfig for_env(const EnvConfig& env);
};

/// Segments a raster into one entity per 4-connected, same-colour,
/// non-black component.
class Perception {
public:
    explicit Perception(PerceptionConfig config) : config_(config) {}

    EntitySet perceive(const Raster& image) const;
    const PerceptionConfig& config() const { return config_; }

private:
    PerceptionConfig config_;
};

/// Whether a transition's entity sets satisfy the three filter properties:
/// the moved entity is singled out, types are stable, and the others stay put.
struct CriteriaReport {
    bool cardinality_match = false;
    std::size_t before_count = 0;
    std::size_t after_count = 0;
    int moved_index = -1;         // index into `before`
    double isolate_margin = 0.0;  // > 0 means the moved entity is unique
    double max_type_drift = 0.0;  // largest type change over matched pairs
    double max_state_drift = 0.0;  // workspace units, non-moved entities

    static std::string csv_header();
    std::string csv_row() const;
};

CriteriaReport check_filter_criteria(const EntitySet& before, const EntitySet& after, MetricKind metric);

}  // namespace rearrange
