#include "rearrange/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rearrange/align.hpp"
#include "rearrange/graph.hpp"

namespace rearrange {

double type_distance(const TypeVec& a, const TypeVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kTypeDim; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

std::string to_string(StateKind k) { return k == StateKind::mask ? "mask" : "position"; }

StateKind parse_state_kind(const std::string& s) {
    if (s == "mask") return StateKind::mask;
    if (s == "position") return StateKind::position;
    throw ConfigError("unknown state kind '" + s + "'");
}

PerceptionConfig PerceptionConfig::for_env(const EnvConfig& env) {
    return {env.geometry(), env.variant == Variant::grid ? StateKind::mask : StateKind::position};
}

namespace {

struct Blob {
    Rgb8 color{};
    std::vector<int> pixels;
};

std::vector<Blob> connected_components(const Raster& image) {
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<Blob> blobs;
    std::vector<int> stack;
    for (int start = 0; start < w * h; ++start) {
        if (label[start] >= 0) continue;
        const Rgb8 c = image.at(start % w, start / w);
        if (c == Rgb8{0, 0, 0}) continue;
        const int id = static_cast<int>(blobs.size());
        blobs.push_back({c, {}});
        label[start] = id;
        stack.assign(1, start);
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            blobs[id].pixels.push_back(p);
            const int x = p % w, y = p / w;
            const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& n : nbr) {
                if (n[0] < 0 || n[1] < 0 || n[0] >= w || n[1] >= h) continue;
                const int q = n[1] * w + n[0];
                if (label[q] >= 0 || image.at(n[0], n[1]) != c) continue;
                label[q] = id;
                stack.push_back(q);
            }
        }
        std::sort(blobs[id].pixels.begin(), blobs[id].pixels.end());
    }
    return blobs;
}

// Hu's first four invariants of the scale-normalised central moments.
std::array<double, 4> shape_signature(const std::vector<int>& pixels, int w, double cx, double cy) {
    double mu20 = 0, mu02 = 0, mu11 = 0, mu30 = 0, mu03 = 0, mu21 = 0, mu12 = 0;
    for (int p : pixels) {
        const double dx = p % w + 0.5 - cx;
        const double dy = p / w + 0.5 - cy;
        mu20 += dx * dx;
        mu02 += dy * dy;
        mu11 += dx * dy;
        mu30 += dx * dx * dx;
        mu03 += dy * dy * dy;
        mu21 += dx * dx * dy;
        mu12 += dx * dy * dy;
    }
    const double m00 = static_cast<double>(pixels.size());
    const double n2 = std::pow(m00, 2.0);
    const double n3 = std::pow(m00, 2.5);
    const double e20 = mu20 / n2, e02 = mu02 / n2, e11 = mu11 / n2;
    const double e30 = mu30 / n3, e03 = mu03 / n3, e21 = mu21 / n3, e12 = mu12 / n3;
    return {
        e20 + e02,
        (e20 - e02) * (e20 - e02) + 4 * e11 * e11,
        (e30 - 3 * e12) * (e30 - 3 * e12) + (3 * e21 - e03) * (3 * e21 - e03),
        (e30 + e12) * (e30 + e12) + (e21 + e03) * (e21 + e03),
    };
}

}  // namespace

EntitySet Perception::perceive(const Raster& image) const {
    const int w = static_cast<int>(image.width);
    const int h = static_cast<int>(image.height);
    EntitySet out;
    for (const auto& blob : connected_components(image)) {
        double sx = 0, sy = 0;
        for (int p : blob.pixels) {
            sx += p % w + 0.5;
            sy += p / w + 0.5;
        }
        const double n = static_cast<double>(blob.pixels.size());
        const double cx = sx / n, cy = sy / n;

        Entity e;
        e.pixel_count = static_cast<int>(blob.pixels.size());
        e.type[0] = blob.color[0] / 255.0;
        e.type[1] = blob.color[1] / 255.0;
        e.type[2] = blob.color[2] / 255.0;
        const auto sig = shape_signature(blob.pixels, w, cx, cy);
        std::copy(sig.begin(), sig.end(), e.type.begin() + 3);
        e.position = config_.geometry.to_workspace(cx, cy);
        if (config_.state_kind == StateKind::position) {
            e.state = e.position;
        } else {
            Mask m(w, h);
            for (int p : blob.pixels) m.set(p);
            e.state = std::move(m);
        }
        out.push_back(std::move(e));
    }
    return out;
}

std::string CriteriaReport::csv_header() {
    return "cardinality_match,before_count,after_count,moved_index,isolate_margin,max_type_drift,max_state_drift";
}

std::string CriteriaReport::csv_row() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%zu,%zu,%d,%.17g,%.17g,%.17g", cardinality_match ? 1 : 0, before_count,
                  after_count, moved_index, isolate_margin, max_type_drift, max_state_drift);
    return buf;
}

CriteriaReport check_filter_criteria(const EntitySet& before, const EntitySet& after, MetricKind metric) {
    CriteriaReport r;
    r.before_count = before.size();
    r.after_count = after.size();
    r.cardinality_match = before.size() == after.size();
    if (!r.cardinality_match || before.empty()) return r;

    // entity correspondence across the transition comes from type matching
    const Alignment a = align(before, after);
    EntitySet matched;
    for (int cur : a.goal_to_current) matched.push_back(before[static_cast<std::size_t>(cur)]);

    const IsolateResult iso = isolate(matched, after, metric);
    r.moved_index = a.goal_to_current[static_cast<std::size_t>(iso.index)];
    r.isolate_margin = iso.margin;
    for (std::size_t k = 0; k < after.size(); ++k) {
        r.max_type_drift = std::max(r.max_type_drift, type_distance(matched[k].type, after[k].type));
        if (static_cast<int>(k) == iso.index) continue;
        r.max_state_drift = std::max(r.max_state_drift, distance(matched[k].position, after[k].position));
    }
    return r;
}

}  // namespace rearrange
