#include "rearrange/kmeans.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rearrange/random.hpp"

namespace rearrange {

namespace {

struct Assignment {
    std::vector<int> cluster;
    std::vector<double> dist;
};

Assignment assign(std::span<const State> points, const std::vector<Centroid>& centroids, MetricKind metric) {
    Assignment a{std::vector<int>(points.size(), 0), std::vector<double>(points.size(), 0.0)};
    for (std::size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            const double d = distance(metric, points[i], centroids[c]);
            if (d < best) {
                best = d;
                a.cluster[i] = static_cast<int>(c);
            }
        }
        a.dist[i] = best;
    }
    return a;
}

// Element-wise means; entries for empty clusters are left as the previous centroid.
std::vector<Centroid> means(std::span<const State> points, const std::vector<int>& cluster,
                            const std::vector<Centroid>& previous, std::vector<int>& counts) {
    const std::size_t m = previous.size();
    counts.assign(m, 0);
    for (int c : cluster) ++counts[static_cast<std::size_t>(c)];
    std::vector<Centroid> out = previous;
    if (std::holds_alternative<Vec2>(points[0])) {
        std::vector<Vec2> sums(m);
        for (std::size_t i = 0; i < points.size(); ++i) sums[cluster[i]] = sums[cluster[i]] + std::get<Vec2>(points[i]);
        for (std::size_t c = 0; c < m; ++c)
            if (counts[c] > 0) out[c] = sums[c] * (1.0 / counts[c]);
        return out;
    }
    const auto& first = std::get<Mask>(points[0]);
    const auto size = static_cast<std::size_t>(first.size());
    std::vector<std::vector<double>> sums(m);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& s = sums[cluster[i]];
        if (s.empty()) s.assign(size, 0.0);
        std::get<Mask>(points[i]).for_each_set([&](int p) { s[static_cast<std::size_t>(p)] += 1.0; });
    }
    for (std::size_t c = 0; c < m; ++c) {
        if (counts[c] == 0) continue;
        for (double& v : sums[c]) v /= counts[c];
        out[c] = MeanMask::from_values(first.width(), first.height(), std::move(sums[c]));
    }
    return out;
}

double shift(const Centroid& a, const Centroid& b) {
    if (const auto* va = std::get_if<Vec2>(&a)) return (*va - std::get<Vec2>(b)).norm();
    const auto& ma = std::get<MeanMask>(a).values;
    const auto& mb = std::get<MeanMask>(b).values;
    double s = 0.0;
    for (std::size_t i = 0; i < ma.size(); ++i) s += (ma[i] - mb[i]) * (ma[i] - mb[i]);
    return std::sqrt(s);
}

}  // namespace

KMeansResult kmeans(std::span<const State> points, int m, MetricKind metric, std::uint64_t seed,
                    const KMeansOptions& options) {
    if (m < 1) throw std::invalid_argument("kmeans: cluster count must be positive");
    if (points.size() < static_cast<std::size_t>(m)) throw std::invalid_argument("kmeans: fewer points than clusters");
    for (const auto& p : points)
        if (p.index() != points[0].index()) throw std::invalid_argument("kmeans: mixed state representations");

    Rng rng(derive_seed(seed, "kmeans"));
    const std::size_t n = points.size();

    // k-means++ seeding; weights are squared distances (the metric itself for squared_euclidean)
    std::vector<Centroid> centroids;
    centroids.push_back(to_centroid(points[rng.below(static_cast<std::uint64_t>(n))]));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < static_cast<std::size_t>(m)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = distance(metric, points[i], centroids.back());
            const double w = metric == MetricKind::squared_euclidean ? d : d * d;
            nearest[i] = std::min(nearest[i], w);
            total += nearest[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double r = rng.uniform() * total;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                r -= nearest[i];
                if (r < 0.0 && nearest[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.below(static_cast<std::uint64_t>(n));
        }
        centroids.push_back(to_centroid(points[pick]));
    }

    KMeansResult result;
    std::vector<int> counts;
    for (int it = 0; it < options.max_iterations; ++it) {
        result.iterations = it + 1;
        const Assignment a = assign(points, centroids, metric);
        auto next = means(points, a.cluster, centroids, counts);

        std::vector<char> used(n, 0);
        for (std::size_t c = 0; c < next.size(); ++c) {
            if (counts[c] > 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!used[i] && (far == n || a.dist[i] > a.dist[far])) far = i;
            if (far == n) break;
            used[far] = 1;
            next[c] = to_centroid(points[far]);
        }

        double max_shift = 0.0;
        for (std::size_t c = 0; c < next.size(); ++c) max_shift = std::max(max_shift, shift(centroids[c], next[c]));
        centroids = std::move(next);
        if (max_shift < options.tolerance) break;
    }

    const Assignment final_assign = assign(points, centroids, metric);
    std::vector<int> final_counts(centroids.size(), 0);
    for (int c : final_assign.cluster) ++final_counts[static_cast<std::size_t>(c)];

    std::vector<int> remap(centroids.size(), -1);
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        if (final_counts[c] == 0) continue;
        remap[c] = static_cast<int>(result.centroids.size());
        result.centroids.push_back(std::move(centroids[c]));
        result.member_count.push_back(final_counts[c]);
    }
    result.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.assignment[i] = remap[final_assign.cluster[i]];
        result.inertia += final_assign.dist[i];
    }
    return result;
}

}  // namespace rearrange
