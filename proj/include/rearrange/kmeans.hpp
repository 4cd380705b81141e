#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rearrange/metric.hpp"

namespace rearrange {

struct KMeansOptions {
    int max_iterations = 300;
    double tolerance = 1e-6;  // max centroid shift (Euclidean, in state space)
};

struct KMeansResult {
    std::vector<Centroid> centroids;
    std::vector<int> member_count;
    std::vector<int> assignment;  // per input point
    double inertia = 0.0;         // sum of metric distances to assigned centroid
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding under `metric`.
///
/// Centroids are element-wise means (mean masks for mask states; the iou
/// metric compares against the mean thresholded at 0.5). An empty cluster is
/// reseeded with the point farthest from its current centroid. Clusters that
/// are still empty after the final assignment are dropped, so fewer than `m`
/// centroids may come back. Deterministic in (points, m, metric, seed).
///
/// Throws std::invalid_argument if m < 1, there are fewer points than m, or
/// the points mix representations.
KMeansResult kmeans(std::span<const State> points, int m, MetricKind metric, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace rearrange
