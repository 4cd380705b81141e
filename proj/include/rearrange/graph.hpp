#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rearrange/buffer.hpp"
#include "rearrange/metric.hpp"
#include "rearrange/perception.hpp"

namespace rearrange {

struct IsolateResult {
    int index = 0;
    double margin = 0.0;  // largest minus second-largest change
};

/// Entity whose state changed most between two index-aligned sets; ties go
/// to the lowest index. Throws std::invalid_argument on empty or
/// differently sized sets.
IsolateResult isolate(const EntitySet& before, const EntitySet& after, MetricKind metric);

struct GraphNode {
    Centroid centroid;
    int member_count = 0;

    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    int from = 0;
    int to = 0;
    Action action;

    bool operator==(const GraphEdge&) const = default;
};

struct GraphConfig {
    int clusters = 16;
    MetricKind isolate_metric = MetricKind::cosine;
    MetricKind cluster_metric = MetricKind::iou;
    MetricKind bind_metric = MetricKind::cosine;
    std::uint64_t seed = 0;

    /// Mask metrics for the grid, squared Euclidean for table positions.
    static GraphConfig defaults_for(Variant v);
};

struct BindResult {
    int node = -1;
    double distance = 0.0;
};

struct Provenance {
    std::string buffer_digest;
    std::string config;

    bool operator==(const Provenance&) const = default;
};

/// Nodes are per-entity state clusters; each directed edge carries the one
/// action seen to move an entity between them. Immutable once built.
class TransitionGraph {
public:
    TransitionGraph() = default;
    TransitionGraph(std::vector<GraphNode> nodes, StateKind kind, RasterGeometry geometry, MetricKind isolate_metric,
                    MetricKind cluster_metric, MetricKind bind_metric);

    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::map<std::pair<int, int>, GraphEdge>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }

    StateKind state_kind() const { return kind_; }
    const RasterGeometry& geometry() const { return geometry_; }
    MetricKind metric() const { return bind_metric_; }
    MetricKind isolate_metric() const { return isolate_metric_; }
    MetricKind cluster_metric() const { return cluster_metric_; }

    /// Nearest centroid under the bind metric; ties to the lowest index.
    /// Throws std::logic_error on an empty graph.
    BindResult bind(const State& state) const;

    const GraphEdge* edge(int from, int to) const;
    /// Outgoing edges of `from`, ordered by target.
    std::vector<const GraphEdge*> out_edges(int from) const;

    /// Inserts or overwrites edge (from, to). Rejects self-loops and bad indices.
    void set_edge(int from, int to, const Action& action);
    bool remove_edge(int from, int to);

    /// Workspace location a node stands for.
    Vec2 node_position(int node) const { return positions_.at(static_cast<std::size_t>(node)); }

    Provenance provenance;

    bool operator==(const TransitionGraph& o) const;

private:
    std::vector<GraphNode> nodes_;
    std::vector<Vec2> positions_;
    std::map<std::pair<int, int>, GraphEdge> edges_;
    StateKind kind_ = StateKind::position;
    RasterGeometry geometry_;
    MetricKind isolate_metric_ = MetricKind::squared_euclidean;
    MetricKind cluster_metric_ = MetricKind::squared_euclidean;
    MetricKind bind_metric_ = MetricKind::squared_euclidean;
};

struct BuildReport {
    std::size_t transitions = 0;
    std::size_t skipped_cardinality = 0;  // perception count changed across the transition
    std::size_t dropped_self_loops = 0;   // before and after bound to the same node
    std::size_t overwritten_edges = 0;
    std::vector<int> membership;  // per node
};

struct BuildResult {
    TransitionGraph graph;
    BuildReport report;
};

/// Abstracts a buffer into a transition graph: perceive, align and isolate
/// the moved entity per transition; cluster the pooled before/after states;
/// bind both ends and tag edge (i, j) with the action, later transitions
/// overwriting earlier ones. Throws std::runtime_error("no usable
/// transitions") when no edge results.
BuildResult build_graph(const ExperienceBuffer& buffer, const Perception& perception, const GraphConfig& config);

// Versioned JSON.
void write_graph(std::ostream& out, const TransitionGraph& graph);
TransitionGraph read_graph(std::istream& in);
void save_graph(const std::string& path, const TransitionGraph& graph);
TransitionGraph load_graph(const std::string& path);

}  // namespace rearrange
