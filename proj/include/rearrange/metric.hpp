#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rearrange/core.hpp"
#include "rearrange/raster.hpp"

namespace rearrange {

/// Binary occupancy mask at raster resolution, stored as a bitset.
class Mask {
public:
    Mask() = default;
    Mask(int width, int height)
        : width_(width), height_(height), words_((static_cast<std::size_t>(width) * height + 63) / 64, 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    int size() const { return width_ * height_; }

    void set(int index) { words_[static_cast<std::size_t>(index) >> 6] |= std::uint64_t{1} << (index & 63); }
    bool test(int index) const { return words_[static_cast<std::size_t>(index) >> 6] >> (index & 63) & 1; }
    int count() const;
    bool empty() const { return count() == 0; }

    /// Calls f(pixel_index) for every set pixel in increasing order.
    template <typename F>
    void for_each_set(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = __builtin_ctzll(bits);
                f(static_cast<int>(w * 64 + b));
                bits &= bits - 1;
            }
        }
    }

    const std::vector<std::uint64_t>& words() const { return words_; }
    bool same_shape(const Mask& o) const { return width_ == o.width_ && height_ == o.height_; }

    bool operator==(const Mask&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint64_t> words_;
};

int intersection_count(const Mask& a, const Mask& b);

/// K-means centroid over masks: per-pixel mean occupancy, plus the 0.5
/// threshold used by the iou metric.
struct MeanMask {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    Mask thresholded;
    double squared_norm = 0.0;

    static MeanMask from_values(int width, int height, std::vector<double> values);
    static MeanMask from_mask(const Mask& m);
    bool operator==(const MeanMask& o) const { return width == o.width && height == o.height && values == o.values; }
};

/// Action-dependent entity state: a workspace position or an occupancy mask.
using State = std::variant<Vec2, Mask>;
/// Graph node payload: mean position or mean mask.
using Centroid = std::variant<Vec2, MeanMask>;

enum class MetricKind { cosine, squared_euclidean, iou };

std::string to_string(MetricKind m);
MetricKind parse_metric(const std::string& s);

/// Throws std::invalid_argument on a representation mismatch (including
/// iou on positions).
double distance(MetricKind metric, const State& a, const State& b);
double distance(MetricKind metric, const State& a, const Centroid& c);

Centroid to_centroid(const State& s);
/// The state a centroid stands for: the mean position, or the thresholded mask.
State to_state(const Centroid& c);

/// Workspace location of a state or centroid (mask: occupancy-weighted mean
/// of pixel centres).
Vec2 position_of(const State& s, const RasterGeometry& geo);
Vec2 position_of(const Centroid& c, const RasterGeometry& geo);

}  // namespace rearrange
