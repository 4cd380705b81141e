#include "rearrange/metric.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace rearrange {

int Mask::count() const {
    int n = 0;
    for (auto w : words_) n += std::popcount(w);
    return n;
}

int intersection_count(const Mask& a, const Mask& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("mask dimensions differ");
    int n = 0;
    for (std::size_t i = 0; i < a.words().size(); ++i) n += std::popcount(a.words()[i] & b.words()[i]);
    return n;
}

MeanMask MeanMask::from_values(int width, int height, std::vector<double> values) {
    MeanMask m;
    m.width = width;
    m.height = height;
    m.thresholded = Mask(width, height);
    for (std::size_t i = 0; i < values.size(); ++i) {
        m.squared_norm += values[i] * values[i];
        if (values[i] >= 0.5) m.thresholded.set(static_cast<int>(i));
    }
    m.values = std::move(values);
    return m;
}

MeanMask MeanMask::from_mask(const Mask& mask) {
    std::vector<double> v(static_cast<std::size_t>(mask.size()), 0.0);
    mask.for_each_set([&](int i) { v[static_cast<std::size_t>(i)] = 1.0; });
    return from_values(mask.width(), mask.height(), std::move(v));
}

std::string to_string(MetricKind m) {
    switch (m) {
        case MetricKind::cosine: return "cosine";
        case MetricKind::squared_euclidean: return "squared_euclidean";
        case MetricKind::iou: return "iou";
    }
    return "?";
}

MetricKind parse_metric(const std::string& s) {
    if (s == "cosine") return MetricKind::cosine;
    if (s == "squared_euclidean") return MetricKind::squared_euclidean;
    if (s == "iou") return MetricKind::iou;
    throw ConfigError("unknown metric '" + s + "'");
}

namespace {

double cosine_from(double dot, double na2, double nb2) {
    if (na2 == 0.0 || nb2 == 0.0) return (na2 == 0.0 && nb2 == 0.0) ? 0.0 : 1.0;
    const double c = dot / std::sqrt(na2 * nb2);
    return std::max(0.0, 1.0 - c);
}

double iou_distance(const Mask& a, const Mask& b) {
    const int inter = intersection_count(a, b);
    const int uni = a.count() + b.count() - inter;
    if (uni == 0) return 0.0;
    return 1.0 - static_cast<double>(inter) / uni;
}

double vec_distance(MetricKind metric, Vec2 a, Vec2 b) {
    switch (metric) {
        case MetricKind::squared_euclidean: return (a - b).squared_norm();
        case MetricKind::cosine: return cosine_from(a.x * b.x + a.y * b.y, a.squared_norm(), b.squared_norm());
        case MetricKind::iou: break;
    }
    throw std::invalid_argument("iou is defined only on mask states");
}

double mask_distance(MetricKind metric, const Mask& a, const Mask& b) {
    switch (metric) {
        case MetricKind::iou: return iou_distance(a, b);
        case MetricKind::cosine: return cosine_from(intersection_count(a, b), a.count(), b.count());
        case MetricKind::squared_euclidean: return a.count() + b.count() - 2.0 * intersection_count(a, b);
    }
    return 0.0;
}

double mask_centroid_distance(MetricKind metric, const Mask& a, const MeanMask& c) {
    if (a.width() != c.width || a.height() != c.height) throw std::invalid_argument("mask dimensions differ");
    if (metric == MetricKind::iou) return iou_distance(a, c.thresholded);
    double dot = 0.0;
    a.for_each_set([&](int i) { dot += c.values[static_cast<std::size_t>(i)]; });
    const double count = a.count();
    if (metric == MetricKind::cosine) return cosine_from(dot, count, c.squared_norm);
    return std::max(0.0, c.squared_norm + count - 2.0 * dot);
}

}  // namespace

double distance(MetricKind metric, const State& a, const State& b) {
    if (a.index() != b.index()) throw std::invalid_argument("state representations differ");
    if (const auto* va = std::get_if<Vec2>(&a)) return vec_distance(metric, *va, std::get<Vec2>(b));
    return mask_distance(metric, std::get<Mask>(a), std::get<Mask>(b));
}

double distance(MetricKind metric, const State& a, const Centroid& c) {
    if (a.index() != c.index()) throw std::invalid_argument("state representations differ");
    if (const auto* va = std::get_if<Vec2>(&a)) return vec_distance(metric, *va, std::get<Vec2>(c));
    return mask_centroid_distance(metric, std::get<Mask>(a), std::get<MeanMask>(c));
}

Centroid to_centroid(const State& s) {
    if (const auto* v = std::get_if<Vec2>(&s)) return *v;
    return MeanMask::from_mask(std::get<Mask>(s));
}

State to_state(const Centroid& c) {
    if (const auto* v = std::get_if<Vec2>(&c)) return *v;
    return std::get<MeanMask>(c).thresholded;
}

Vec2 position_of(const State& s, const RasterGeometry& geo) {
    if (const auto* v = std::get_if<Vec2>(&s)) return *v;
    const auto& m = std::get<Mask>(s);
    double sx = 0, sy = 0;
    int n = 0;
    m.for_each_set([&](int i) {
        sx += i % m.width() + 0.5;
        sy += i / m.width() + 0.5;
        ++n;
    });
    if (n == 0) return {};
    return geo.to_workspace(sx / n, sy / n);
}

Vec2 position_of(const Centroid& c, const RasterGeometry& geo) {
    if (const auto* v = std::get_if<Vec2>(&c)) return *v;
    const auto& m = std::get<MeanMask>(c);
    double sx = 0, sy = 0, total = 0;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
        const double v = m.values[i];
        if (v == 0.0) continue;
        sx += v * (static_cast<int>(i) % m.width + 0.5);
        sy += v * (static_cast<int>(i) / m.width + 0.5);
        total += v;
    }
    if (total == 0.0) return {};
    return geo.to_workspace(sx / total, sy / total);
}

}  // namespace rearrange
