#include "rearrange/config.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "rearrange/keyvalue.hpp"
#include "rearrange/random.hpp"

namespace rearrange {

const std::vector<ConfigKey>& RunConfig::keys() {
    static const std::vector<ConfigKey> k = {
        {"variant", "grid", "grid or table"},
        {"grid_side", "auto", "cells per grid side"},
        {"table_width", "auto", "table width"},
        {"table_height", "auto", "table height"},
        {"object_count", "auto", "objects in buffer episodes"},
        {"image_size", "auto", "raster side in pixels"},
        {"pick_threshold", "auto", "pick radius"},
        {"place_threshold", "auto", "goal satisfaction radius"},
        {"palette_size", "auto", "table palette size"},
        {"footprint_radius", "auto", "table object radius"},
        {"min_separation", "auto", "table minimum object spacing"},
        {"seed", "0", "root seed"},
        {"buffer_episodes", "5000", "episodes in a generated buffer"},
        {"episode_length", "5", "observations per buffer episode"},
        {"clusters", "auto", "graph node count M"},
        {"isolate_metric", "auto", "cosine, squared_euclidean or iou"},
        {"cluster_metric", "auto", "cosine, squared_euclidean or iou"},
        {"bind_metric", "auto", "cosine, squared_euclidean or iou"},
        {"selection_mode", "stochastic", "stochastic or argmax"},
        {"satisfied_threshold", "auto", "constraint distance counted as met"},
        {"bind_max_distance", "auto", "reject bindings farther than this"},
        {"strict_actions", "false", "replay stored edge actions verbatim"},
        {"method", "ncs", "ncs, rand, nf or mpc"},
        {"setting", "complete", "complete or partial"},
        {"objects", "4,5,6,7", "object counts to evaluate"},
        {"episodes", "100", "episodes per seed"},
        {"seeds", "10", "evaluation seeds"},
        {"horizon_multiplier", "4", "horizon per unsatisfied constraint"},
        {"action_noise_std", "0", "Gaussian noise added to each action component"},
        {"timing", "false", "record wall-clock seconds in reports"},
        {"cem_iterations", "10", "planner iterations"},
        {"cem_elite_ratio", "0.05", "planner elite fraction"},
        {"cem_population", "250", "planner population"},
        {"cem_horizon", "5", "planner horizon cap"},
        {"cem_init_std", "0.3", "planner initial std"},
        {"cem_min_std", "0.001", "planner std floor"},
        {"action_match_tol", "auto", "rollout pick matching radius"},
    };
    return k;
}

namespace {

const ConfigKey* find_key(const std::string& name) {
    for (const auto& k : RunConfig::keys())
        if (k.name == name) return &k;
    return nullptr;
}

bool is_env_key(const std::string& name) {
    EnvConfig probe;
    for (const auto& [k, v] : env_config_to_kv(probe))
        if (k == name) return true;
    return false;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!find_key(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

const std::string& RunConfig::raw(const std::string& key) const {
    const auto* k = find_key(key);
    if (!k) throw ConfigError("unknown config key '" + key + "'");
    const auto it = values_.find(key);
    return it == values_.end() ? k->fallback : it->second;
}

RunConfig RunConfig::from_text(std::string_view text) {
    RunConfig c;
    for (const auto& [k, v] : parse_key_values(text)) c.set(k, v);
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

std::uint64_t RunConfig::seed() const { return parse_u64("seed", raw("seed")); }

EnvConfig RunConfig::env() const {
    EnvConfig c = parse_variant(raw("variant")) == Variant::grid ? EnvConfig::grid_defaults() : EnvConfig::table_defaults();
    for (const auto& k : keys()) {
        if (!is_env_key(k.name) || k.name == "variant") continue;
        const auto& v = raw(k.name);
        if (v != "auto") apply_env_key(c, k.name, v);
    }
    c.validate();
    return c;
}

BufferSpec RunConfig::buffer() const {
    BufferSpec b;
    b.episodes = static_cast<int>(parse_int("buffer_episodes", raw("buffer_episodes")));
    b.episode_length = static_cast<int>(parse_int("episode_length", raw("episode_length")));
    b.seed = derive_seed(seed(), "buffer");
    if (b.episodes < 1) throw ConfigError("buffer_episodes must be positive");
    if (b.episode_length < 2) throw ConfigError("episode_length must be at least 2");
    return b;
}

GraphConfig RunConfig::graph() const {
    GraphConfig g = GraphConfig::defaults_for(env().variant);
    if (raw("clusters") != "auto") g.clusters = static_cast<int>(parse_int("clusters", raw("clusters")));
    if (raw("isolate_metric") != "auto") g.isolate_metric = parse_metric(raw("isolate_metric"));
    if (raw("cluster_metric") != "auto") g.cluster_metric = parse_metric(raw("cluster_metric"));
    if (raw("bind_metric") != "auto") g.bind_metric = parse_metric(raw("bind_metric"));
    g.seed = derive_seed(seed(), "graph");
    if (g.clusters < 1) throw ConfigError("clusters must be positive");
    return g;
}

ControllerConfig RunConfig::controller() const {
    ControllerConfig c = ControllerConfig::defaults_for(env(), graph());
    c.selection_mode = parse_selection_mode(raw("selection_mode"));
    if (raw("satisfied_threshold") != "auto")
        c.satisfied_threshold = parse_double("satisfied_threshold", raw("satisfied_threshold"));
    if (raw("bind_max_distance") == "inf")
        c.bind_max_distance = std::numeric_limits<double>::infinity();
    else if (raw("bind_max_distance") != "auto")
        c.bind_max_distance = parse_double("bind_max_distance", raw("bind_max_distance"));
    c.strict_actions = parse_bool("strict_actions", raw("strict_actions"));
    if (c.satisfied_threshold < 0) throw ConfigError("satisfied_threshold must be non-negative");
    return c;
}

CemParams RunConfig::cem() const {
    CemParams p;
    p.iterations = static_cast<int>(parse_int("cem_iterations", raw("cem_iterations")));
    p.elite_ratio = parse_double("cem_elite_ratio", raw("cem_elite_ratio"));
    p.population = static_cast<int>(parse_int("cem_population", raw("cem_population")));
    p.horizon = static_cast<int>(parse_int("cem_horizon", raw("cem_horizon")));
    p.init_std = parse_double("cem_init_std", raw("cem_init_std"));
    p.min_std = parse_double("cem_min_std", raw("cem_min_std"));
    p.validate();
    return p;
}

EvalSpec RunConfig::eval() const {
    EvalSpec s;
    s.method = parse_method(raw("method"));
    s.setting = parse_setting(raw("setting"));
    s.object_counts = parse_int_list("objects", raw("objects"));
    s.episodes = static_cast<int>(parse_int("episodes", raw("episodes")));
    s.seeds = static_cast<int>(parse_int("seeds", raw("seeds")));
    s.horizon_multiplier = parse_double("horizon_multiplier", raw("horizon_multiplier"));
    s.action_noise_std = parse_double("action_noise_std", raw("action_noise_std"));
    s.timing = parse_bool("timing", raw("timing"));
    s.seed = derive_seed(seed(), "eval");
    s.validate();
    return s;
}

double RunConfig::action_match_tol() const {
    if (raw("action_match_tol") == "auto") return env().pick_threshold;
    const double t = parse_double("action_match_tol", raw("action_match_tol"));
    if (!(t > 0)) throw ConfigError("action_match_tol must be positive");
    return t;
}

void RunConfig::validate() const {
    seed();
    env();
    buffer();
    graph();
    controller();
    cem();
    eval();
    action_match_tol();
}

std::string RunConfig::to_text() const {
    const EnvConfig e = env();
    const GraphConfig g = graph();
    const ControllerConfig c = controller();
    std::map<std::string, std::string> resolved;
    for (const auto& [k, v] : env_config_to_kv(e)) resolved[k] = v;
    resolved["clusters"] = std::to_string(g.clusters);
    resolved["isolate_metric"] = to_string(g.isolate_metric);
    resolved["cluster_metric"] = to_string(g.cluster_metric);
    resolved["bind_metric"] = to_string(g.bind_metric);
    resolved["satisfied_threshold"] = format_double(c.satisfied_threshold);
    resolved["bind_max_distance"] = format_double(c.bind_max_distance);
    resolved["action_match_tol"] = format_double(action_match_tol());
    KeyValues kv;
    for (const auto& k : keys()) {
        const auto it = resolved.find(k.name);
        kv.emplace_back(k.name, it != resolved.end() ? it->second : raw(k.name));
    }
    return format_key_values(kv);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const double v : parse_double_list(key, value)) {
        if (v != static_cast<int>(v)) throw ConfigError("'" + key + "': expected integers, got '" + value + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = std::min(value.find(',', start), value.size());
        std::string item = value.substr(start, comma - start);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        out.push_back(parse_double(key, item));
        start = comma + 1;
    }
    return out;
}

}  // namespace rearrange
