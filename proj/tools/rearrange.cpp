// Command-line entry point: gen-buffer, build-graph, evaluate, inspect.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "rearrange/baselines.hpp"
#include "rearrange/config.hpp"
#include "rearrange/graph.hpp"
#include "rearrange/harness.hpp"
#include "rearrange/inspect.hpp"
#include "rearrange/keyvalue.hpp"

using namespace rearrange;

namespace {

enum Exit { ok = 0, usage = 1, io = 2, format = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

// env and graph keys decide what a graph means; the rest is evaluation only
const std::vector<std::string>& construction_keys() {
    static const std::vector<std::string> keys = {"variant",       "grid_side",      "table_width",    "table_height",
                                                  "image_size",    "palette_size",   "footprint_radius", "min_separation",
                                                  "clusters",      "isolate_metric", "cluster_metric", "bind_metric"};
    return keys;
}

std::string construction_part(const std::string& config_text) {
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : parse_key_values(config_text)) kv[k] = v;
    std::string out;
    for (const auto& k : construction_keys()) out += k + "=" + kv[k] + ";";
    return out;
}

struct Options {
    std::string config_path;
    std::map<std::string, std::string> overrides;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    RunConfig resolve() const {
        RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
        for (const auto& [k, v] : overrides) c.set(k, v);
        c.validate();
        return c;
    }

    bool explicitly_set(const std::string& key) const {
        if (overrides.count(key)) return true;
        if (config_path.empty()) return false;
        for (const auto& [k, v] : RunConfig::load(config_path).explicit_values())
            if (k == key) return true;
        return false;
    }
};

// Construction keys the graph was built with, unless the caller set them.
RunConfig adopt_graph_config(const Options& opt, RunConfig cfg, const TransitionGraph& graph) {
    const auto& keys = construction_keys();
    for (const auto& [k, v] : parse_key_values(graph.provenance.config))
        if (std::find(keys.begin(), keys.end(), k) != keys.end() && !opt.explicitly_set(k)) cfg.set(k, v);
    cfg.validate();
    return cfg;
}

int gen_buffer(const Options& opt, const std::string& out) {
    const RunConfig cfg = opt.resolve();
    const ExperienceBuffer buf = generate_buffer(cfg.env(), cfg.buffer());
    save_buffer(out, buf);
    std::cout << "episodes " << buf.episodes.size() << ", transitions " << buf.transition_count() << ", digest "
              << buf.digest() << "\n";
    return ok;
}

int build(const Options& opt, const std::string& buffer_path, const std::string& out) {
    const RunConfig cfg = opt.resolve();
    const ExperienceBuffer buf = load_buffer(buffer_path);
    RunConfig effective = cfg;
    for (const auto& [k, v] : env_config_to_kv(buf.env))
        if (k != "object_count") effective.set(k, v);
    const Perception perception(PerceptionConfig::for_env(buf.env));
    auto [graph, report] = build_graph(buf, perception, effective.graph());
    graph.provenance.config = effective.to_text();
    save_graph(out, graph);
    std::cout << "nodes " << graph.node_count() << ", edges " << graph.edges().size() << ", transitions "
              << report.transitions << ", dropped " << report.skipped_cardinality + report.dropped_self_loops
              << " (cardinality " << report.skipped_cardinality << ", self-loop " << report.dropped_self_loops
              << "), overwritten " << report.overwritten_edges << "\n";
    return ok;
}

int evaluate_cmd(const Options& opt, const std::string& graph_path, const std::string& buffer_path,
                 const std::string& sweep_arg, const std::string& out) {
    RunConfig cfg = opt.resolve();
    std::optional<TransitionGraph> graph;
    std::optional<ExperienceBuffer> buffer;
    std::optional<SetGraph> set_graph;
    if (!graph_path.empty()) graph = load_graph(graph_path);
    if (!buffer_path.empty()) buffer = load_buffer(buffer_path);
    if (graph) cfg = adopt_graph_config(opt, cfg, *graph);
    EvalSpec spec = cfg.eval();
    spec.jobs = opt.jobs;

    if (graph) {
        if (construction_part(graph->provenance.config) != construction_part(cfg.to_text()))
            std::cerr << "warning: graph was built with a different configuration than the current one\n";
        if (buffer && buffer->digest() != graph->provenance.buffer_digest)
            std::cerr << "warning: buffer digest does not match the graph's provenance\n";
    }

    EvalContext ctx;
    ctx.env = cfg.env();
    ctx.graph = graph ? &*graph : nullptr;
    ctx.controller = cfg.controller();
    ctx.cem = cfg.cem();
    ctx.action_match_tol = cfg.action_match_tol();
    if (spec.method != Method::rand && !graph) throw ConfigError(to_string(spec.method) + " needs --graph");
    if (spec.method == Method::nf) {
        if (!buffer) throw ConfigError("nf needs --buffer");
        set_graph = nf_build(*buffer, Perception(PerceptionConfig::for_env(buffer->env)), *graph);
        ctx.set_graph = &*set_graph;
    }

    std::string csv;
    if (sweep_arg.empty()) {
        csv = evaluate(ctx, spec).csv();
    } else {
        const auto eq = sweep_arg.find('=');
        if (eq == std::string::npos) throw ConfigError("--sweep expects axis=v1,v2,...");
        const SweepAxis axis = parse_sweep_axis(sweep_arg.substr(0, eq));
        const auto values = parse_double_list("sweep", sweep_arg.substr(eq + 1));
        const SweepInputs inputs{buffer ? &*buffer : nullptr, cfg.graph()};
        csv = sweep_csv(axis, sweep(ctx, spec, inputs, axis, values));
    }
    write_text(out, csv);
    if (out != "-") {
        std::string prov = "# resolved configuration\n" + cfg.to_text();
        if (graph) prov += "# graph buffer_digest = " + graph->provenance.buffer_digest + "\n";
        write_text(out + ".provenance", prov);
    }
    return ok;
}

int inspect_cmd(const std::string& graph_path, bool csv) {
    const TransitionGraph g = load_graph(graph_path);
    std::cout << (csv ? inspect_csv(g) : inspect_text(g));
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factorised transition-graph planning for object rearrangement"};
    app.require_subcommand(1);
    Options opt;
    std::map<std::string, std::string> flag_values;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "key = value config file");
        for (const auto& k : RunConfig::keys())
            sub->add_option("--" + k.name, flag_values[k.name], k.help + " (default " + k.fallback + ")");
    };

    std::string out, buffer_path, graph_path, sweep_arg;
    bool csv = false;

    auto* gen = app.add_subcommand("gen-buffer", "generate an experience buffer with the scripted data policy");
    add_common(gen);
    gen->add_option("--out,-o", out, "buffer file")->required();

    auto* bg = app.add_subcommand("build-graph", "abstract a buffer into a transition graph");
    add_common(bg);
    bg->add_option("--buffer,-b", buffer_path, "buffer file")->required();
    bg->add_option("--out,-o", out, "graph file")->required();

    auto* ev = app.add_subcommand("evaluate", "run the evaluation protocol and write a CSV report");
    add_common(ev);
    ev->add_option("--graph,-g", graph_path, "graph file (not needed for rand)");
    ev->add_option("--buffer,-b", buffer_path, "buffer file (nf, and clusters/buffer_fraction sweeps)");
    ev->add_option("--sweep", sweep_arg, "axis=v1,v2,... with axis clusters, buffer_fraction, noise_std or horizon_multiplier");
    ev->add_option("--jobs,-j", opt.jobs, "worker threads")->check(CLI::PositiveNumber);
    ev->add_option("--out,-o", out, "report CSV, - for stdout")->default_val("-");

    auto* in = app.add_subcommand("inspect", "dump graph nodes and adjacency");
    in->add_option("graph", graph_path, "graph file")->required();
    in->add_flag("--csv", csv, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }
    for (const auto& [k, v] : flag_values)
        if (!v.empty()) opt.overrides[k] = v;

    try {
        if (gen->parsed()) return gen_buffer(opt, out);
        if (bg->parsed()) return build(opt, buffer_path, out);
        if (ev->parsed()) return evaluate_cmd(opt, graph_path, buffer_path, sweep_arg, out);
        return inspect_cmd(graph_path, csv);
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return format;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage;
    }
}
