#include "rearrange/inspect.hpp"

#include <cstdio>

namespace rearrange {

namespace {

std::string targets(const TransitionGraph& g, int node, const char* sep) {
    std::string out;
    for (const auto* e : g.out_edges(node)) {
        if (!out.empty()) out += sep;
        out += std::to_string(e->to);
    }
    return out;
}

}  // namespace

std::string inspect_text(const TransitionGraph& g) {
    char line[160];
    std::snprintf(line, sizeof line, "nodes: %zu (%s states, bind metric %s)\n", g.node_count(),
                  to_string(g.state_kind()).c_str(), to_string(g.metric()).c_str());
    std::string out = line;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const Vec2 p = g.node_position(static_cast<int>(i));
        std::snprintf(line, sizeof line, "  %3zu  at (%.4f, %.4f)  members %d\n", i, p.x, p.y, g.nodes()[i].member_count);
        out += line;
    }
    out += "edges: " + std::to_string(g.edges().size()) + "\n";
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const std::string t = targets(g, static_cast<int>(i), " ");
        if (!t.empty()) out += "  " + std::to_string(i) + " -> " + t + "\n";
    }
    return out;
}

std::string inspect_csv(const TransitionGraph& g) {
    std::string out = "node,x,y,member_count,targets\n";
    char line[96];
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const Vec2 p = g.node_position(static_cast<int>(i));
        std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%d,", i, p.x, p.y, g.nodes()[i].member_count);
        out += line + targets(g, static_cast<int>(i), ";") + "\n";
    }
    return out;
}

}  // namespace rearrange
