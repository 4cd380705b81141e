#include "rearrange/graph.hpp"

#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "rearrange/align.hpp"
#include "rearrange/kmeans.hpp"

namespace rearrange {

IsolateResult isolate(const EntitySet& before, const EntitySet& after, MetricKind metric) {
    if (before.empty() || after.empty()) throw std::invalid_argument("isolate: empty entity set");
    if (before.size() != after.size()) throw std::invalid_argument("isolate: entity sets differ in size");
    IsolateResult r;
    double best = -1.0, second = 0.0;
    for (std::size_t k = 0; k < before.size(); ++k) {
        const double d = distance(metric, before[k].state, after[k].state);
        if (d > best) {
            if (best >= 0.0) second = best;
            best = d;
            r.index = static_cast<int>(k);
        } else if (d > second) {
            second = d;
        }
    }
    r.margin = before.size() == 1 ? best : best - second;
    return r;
}

GraphConfig GraphConfig::defaults_for(Variant v) {
    if (v == Variant::grid) return {16, MetricKind::cosine, MetricKind::iou, MetricKind::cosine, 0};
    return {45, MetricKind::squared_euclidean, MetricKind::squared_euclidean, MetricKind::squared_euclidean, 0};
}

TransitionGraph::TransitionGraph(std::vector<GraphNode> nodes, StateKind kind, RasterGeometry geometry,
                                 MetricKind isolate_metric, MetricKind cluster_metric, MetricKind bind_metric)
    : nodes_(std::move(nodes)),
      kind_(kind),
      geometry_(geometry),
      isolate_metric_(isolate_metric),
      cluster_metric_(cluster_metric),
      bind_metric_(bind_metric) {
    for (const auto& n : nodes_) {
        const bool is_pos = std::holds_alternative<Vec2>(n.centroid);
        if (is_pos != (kind_ == StateKind::position)) throw std::invalid_argument("node centroid does not match state kind");
        positions_.push_back(position_of(n.centroid, geometry_));
    }
}

BindResult TransitionGraph::bind(const State& state) const {
    if (nodes_.empty()) throw std::logic_error("bind: empty graph");
    BindResult r{0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const double d = distance(bind_metric_, state, nodes_[i].centroid);
        if (d < r.distance) {
            r.distance = d;
            r.node = static_cast<int>(i);
        }
    }
    return r;
}

const GraphEdge* TransitionGraph::edge(int from, int to) const {
    const auto it = edges_.find({from, to});
    return it == edges_.end() ? nullptr : &it->second;
}

std::vector<const GraphEdge*> TransitionGraph::out_edges(int from) const {
    std::vector<const GraphEdge*> out;
    for (auto it = edges_.lower_bound({from, std::numeric_limits<int>::min()}); it != edges_.end() && it->first.first == from;
         ++it)
        out.push_back(&it->second);
    return out;
}

void TransitionGraph::set_edge(int from, int to, const Action& action) {
    const int n = static_cast<int>(nodes_.size());
    if (from < 0 || to < 0 || from >= n || to >= n) throw std::out_of_range("edge endpoint out of range");
    if (from == to) throw std::invalid_argument("self-loop edges are not stored");
    edges_[{from, to}] = GraphEdge{from, to, action};
}

bool TransitionGraph::remove_edge(int from, int to) { return edges_.erase({from, to}) > 0; }

bool TransitionGraph::operator==(const TransitionGraph& o) const {
    return nodes_ == o.nodes_ && edges_ == o.edges_ && kind_ == o.kind_ &&
           geometry_.pixels_per_unit == o.geometry_.pixels_per_unit && isolate_metric_ == o.isolate_metric_ &&
           cluster_metric_ == o.cluster_metric_ && bind_metric_ == o.bind_metric_ && provenance == o.provenance;
}

BuildResult build_graph(const ExperienceBuffer& buffer, const Perception& perception, const GraphConfig& config) {
    if (buffer.episodes.empty()) throw std::invalid_argument("build_graph: empty buffer");

    struct EntityTransition {
        std::size_t before;  // indices into `states`
        std::size_t after;
        Action action;
    };
    std::vector<State> states;
    std::vector<EntityTransition> transitions;
    BuildReport report;

    for (const auto& ep : buffer.episodes) {
        std::vector<EntitySet> seen;
        seen.reserve(ep.observations.size());
        for (const auto& o : ep.observations) seen.push_back(perception.perceive(o));
        for (std::size_t t = 0; t < ep.actions.size(); ++t) {
            ++report.transitions;
            const auto& before = seen[t];
            const auto& after = seen[t + 1];
            if (before.size() != after.size() || before.empty()) {
                ++report.skipped_cardinality;
                continue;
            }
            const Alignment a = align(before, after);
            EntitySet matched;
            matched.reserve(after.size());
            for (int cur : a.goal_to_current) matched.push_back(before[static_cast<std::size_t>(cur)]);
            const auto k = static_cast<std::size_t>(isolate(matched, after, config.isolate_metric).index);
            states.push_back(matched[k].state);
            states.push_back(after[k].state);
            transitions.push_back({states.size() - 2, states.size() - 1, ep.actions[t]});
        }
    }
    if (transitions.empty()) throw std::runtime_error("no usable transitions");

    const int m = std::min<int>(config.clusters, static_cast<int>(states.size()));
    auto km = kmeans(states, m, config.cluster_metric, config.seed);

    std::vector<GraphNode> nodes;
    for (std::size_t c = 0; c < km.centroids.size(); ++c) nodes.push_back({std::move(km.centroids[c]), km.member_count[c]});
    report.membership = km.member_count;

    TransitionGraph graph(std::move(nodes), perception.config().state_kind, perception.config().geometry,
                          config.isolate_metric, config.cluster_metric, config.bind_metric);
    for (const auto& tr : transitions) {
        const int i = graph.bind(states[tr.before]).node;
        const int j = graph.bind(states[tr.after]).node;
        if (i == j) {
            ++report.dropped_self_loops;
            continue;
        }
        if (graph.edge(i, j)) ++report.overwritten_edges;
        graph.set_edge(i, j, tr.action);
    }
    if (graph.edges().empty()) throw std::runtime_error("no usable transitions");
    graph.provenance.buffer_digest = buffer.digest();
    return {std::move(graph), std::move(report)};
}

namespace {

using nlohmann::json;
constexpr int kGraphVersion = 1;

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 json_vec(const json& j) {
    if (!j.is_array() || j.size() != 2) throw FormatError("format error: expected a 2-vector");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

void write_graph(std::ostream& out, const TransitionGraph& graph) {
    json j;
    j["format"] = "transition-graph";
    j["version"] = kGraphVersion;
    j["state_kind"] = to_string(graph.state_kind());
    j["metric"] = to_string(graph.metric());
    j["isolate_metric"] = to_string(graph.isolate_metric());
    j["cluster_metric"] = to_string(graph.cluster_metric());
    j["pixels_per_unit"] = graph.geometry().pixels_per_unit;
    json nodes = json::array();
    for (const auto& n : graph.nodes()) {
        json node;
        if (const auto* v = std::get_if<Vec2>(&n.centroid)) {
            node["centroid"] = vec_json(*v);
        } else {
            const auto& m = std::get<MeanMask>(n.centroid);
            node["centroid"] = {{"width", m.width}, {"height", m.height}, {"values", m.values}};
        }
        node["member_count"] = n.member_count;
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& [key, e] : graph.edges())
        edges.push_back({{"from", e.from}, {"to", e.to}, {"action", {{"w", vec_json(e.action.w)}, {"dw", vec_json(e.action.dw)}}}});
    j["edges"] = std::move(edges);
    j["provenance"] = {{"buffer_digest", graph.provenance.buffer_digest}, {"config", graph.provenance.config}};
    out << j.dump(1) << '\n';
}

TransitionGraph read_graph(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw FormatError(std::string("format error: graph is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != "transition-graph") throw FormatError("format error: not a transition graph");
        if (j.at("version").get<int>() != kGraphVersion)
            throw FormatError("format error: unsupported graph version " + j.at("version").dump());
        const StateKind kind = parse_state_kind(j.at("state_kind").get<std::string>());
        std::vector<GraphNode> nodes;
        for (const auto& n : j.at("nodes")) {
            GraphNode node;
            node.member_count = n.at("member_count").get<int>();
            const auto& c = n.at("centroid");
            if (kind == StateKind::position) {
                node.centroid = json_vec(c);
            } else {
                const int w = c.at("width").get<int>(), h = c.at("height").get<int>();
                auto values = c.at("values").get<std::vector<double>>();
                if (w <= 0 || h <= 0 || values.size() != static_cast<std::size_t>(w) * h)
                    throw FormatError("format error: mask centroid size mismatch");
                node.centroid = MeanMask::from_values(w, h, std::move(values));
            }
            nodes.push_back(std::move(node));
        }
        TransitionGraph g(std::move(nodes), kind, RasterGeometry{j.at("pixels_per_unit").get<double>()},
                          parse_metric(j.at("isolate_metric").get<std::string>()),
                          parse_metric(j.at("cluster_metric").get<std::string>()),
                          parse_metric(j.at("metric").get<std::string>()));
        for (const auto& e : j.at("edges")) {
            const auto& a = e.at("action");
            g.set_edge(e.at("from").get<int>(), e.at("to").get<int>(), Action{json_vec(a.at("w")), json_vec(a.at("dw"))});
        }
        g.provenance.buffer_digest = j.at("provenance").at("buffer_digest").get<std::string>();
        g.provenance.config = j.at("provenance").at("config").get<std::string>();
        return g;
    } catch (const json::exception& e) {
        throw FormatError(std::string("format error: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("format error: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw FormatError(std::string("format error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("format error: ") + e.what());
    }
}

void save_graph(const std::string& path, const TransitionGraph& graph) {
    std::ofstream out(path);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    write_graph(out, graph);
    out.flush();
    if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

TransitionGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    return read_graph(in);
}

}  // namespace rearrange
