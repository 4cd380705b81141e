#include "rearrange/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rearrange/keyvalue.hpp"

namespace rearrange {

namespace {

std::vector<int> occupied_cells(const Environment& env, const EnvState& s) {
    std::vector<int> cells;
    for (const auto& o : s.objects) cells.push_back(env.cell_of(o.position));
    return cells;
}

Vec2 free_destination(const Environment& env, const EnvState& s, int mover, Rng& rng) {
    const EnvConfig& c = env.config();
    if (c.variant == Variant::grid) {
        const auto taken = occupied_cells(env, s);
        std::vector<int> free;
        for (int cell = 0; cell < c.location_count(); ++cell)
            if (std::find(taken.begin(), taken.end(), cell) == taken.end()) free.push_back(cell);
        if (free.empty()) throw ConfigError("no free cell to move to");
        return env.cell_center(free[static_cast<std::size_t>(rng.below(static_cast<int>(free.size())))]);
    }
    const double r = c.footprint_radius;
    for (int attempts = 0; attempts < 100000; ++attempts) {
        const Vec2 p{rng.uniform(r, c.table_width - r), rng.uniform(r, c.table_height - r)};
        bool ok = true;
        for (std::size_t i = 0; i < s.objects.size(); ++i)
            if (static_cast<int>(i) != mover) ok = ok && distance(p, s.objects[i].position) >= c.min_separation;
        if (ok) return p;
    }
    throw ConfigError("no free point to move to; table too crowded");
}

ExperienceBuffer generate_once(const Environment& env, const BufferSpec& spec, std::uint64_t stream) {
    ExperienceBuffer buf;
    buf.env = env.config();
    buf.seed = spec.seed;
    buf.episodes.reserve(static_cast<std::size_t>(spec.episodes));
    for (int e = 0; e < spec.episodes; ++e) {
        EnvState s = env.reset(derive_seed(stream, "buffer.episode", static_cast<std::uint64_t>(e))).first;
        Rng rng(derive_seed(stream, "buffer.policy", static_cast<std::uint64_t>(e)));
        Episode ep;
        ep.observations.push_back(env.render(s));
        for (int t = 1; t < spec.episode_length; ++t) {
            const int mover = rng.below(static_cast<int>(s.objects.size()));
            const Vec2 w = s.objects[static_cast<std::size_t>(mover)].position;
            const Action a{w, free_destination(env, s, mover, rng) - w};
            auto out = env.step_detailed(s, a);
            s = std::move(out.state);
            ep.actions.push_back(a);
            ep.moved.push_back(out.moved.value_or(-1));
            ep.observations.push_back(env.render(s));
        }
        buf.episodes.push_back(std::move(ep));
    }
    return buf;
}

}  // namespace

bool grid_coverage_complete(const ExperienceBuffer& buffer) {
    if (buffer.env.variant != Variant::grid) return false;
    const Environment env(buffer.env);
    std::vector<char> src(static_cast<std::size_t>(buffer.env.location_count())), dst(src.size());
    for (const auto& ep : buffer.episodes) {
        for (const auto& a : ep.actions) {
            src[static_cast<std::size_t>(env.cell_of(a.w))] = 1;
            dst[static_cast<std::size_t>(env.cell_of(a.destination()))] = 1;
        }
    }
    return std::all_of(src.begin(), src.end(), [](char c) { return c; }) &&
           std::all_of(dst.begin(), dst.end(), [](char c) { return c; });
}

ExperienceBuffer generate_buffer(const EnvConfig& env_config, const BufferSpec& spec) {
    env_config.validate();
    if (spec.episodes < 1) throw ConfigError("buffer episodes must be positive");
    if (spec.episode_length < 2) throw ConfigError("episode length must be at least 2");
    const Environment env(env_config);
    const bool check = spec.require_coverage && env_config.variant == Variant::grid;
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        const std::uint64_t stream = attempt == 0 ? spec.seed : derive_seed(spec.seed, "buffer.retry", attempt);
        auto buf = generate_once(env, spec, stream);
        if (!check || grid_coverage_complete(buf)) return buf;
    }
    throw std::runtime_error("could not generate a buffer covering every grid cell");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::ncs: return "ncs";
        case Method::rand: return "rand";
        case Method::nf: return "nf";
        case Method::mpc: return "mpc";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "ncs") return Method::ncs;
    if (s == "rand") return Method::rand;
    if (s == "nf") return Method::nf;
    if (s == "mpc") return Method::mpc;
    throw ConfigError("unknown method '" + s + "'");
}

double fractional_success(int unsat_initial, int unsat_final) {
    if (unsat_initial < 1) throw std::invalid_argument("fractional_success: no unsatisfied constraints");
    return std::max(0, unsat_initial - unsat_final) / static_cast<double>(unsat_initial);
}

void EvalSpec::validate() const {
    if (episodes < 1) throw ConfigError("episodes must be at least 1");
    if (seeds < 1) throw ConfigError("seeds must be at least 1");
    if (!(horizon_multiplier >= 1.0)) throw ConfigError("horizon_multiplier must be at least 1");
    if (!(action_noise_std >= 0.0)) throw ConfigError("action_noise_std must be non-negative");
    if (object_counts.empty()) throw ConfigError("no object counts to evaluate");
    for (int k : object_counts)
        if (k < 1) throw ConfigError("object counts must be positive");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

const EvalRow& EvalReport::aggregate(int k) const {
    for (const auto& r : rows)
        if (r.k == k && r.seed < 0) return r;
    throw std::out_of_range("no aggregate row for k=" + std::to_string(k));
}

std::string EvalReport::csv_header() {
    return "method,setting,k,seed,episodes,mean_fsr,stderr,fallback_missing_edge,fallback_bind,wallclock_s";
}

std::string csv_row(const EvalRow& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%s,%d,%.6f,%.6f,%zu,%zu,%.3f", to_string(r.method).c_str(),
                  to_string(r.setting).c_str(), r.k, r.seed < 0 ? "all" : std::to_string(r.seed).c_str(), r.episodes,
                  r.mean_fsr, r.stderr_fsr, r.fallback_missing_edge, r.fallback_bind, r.wallclock_s);
    return buf;
}

std::string EvalReport::csv() const {
    std::string out = csv_header() + "\n";
    for (const auto& r : rows) out += csv_row(r) + "\n";
    return out;
}

namespace {

void check_context(const EvalContext& ctx, Method method) {
    ctx.env.validate();
    if (method == Method::rand) return;
    if (!ctx.graph) throw ConfigError(to_string(method) + " needs a transition graph");
    if (method == Method::nf && !ctx.set_graph) throw ConfigError("nf needs a configuration graph");
    const auto kind = PerceptionConfig::for_env(ctx.env).state_kind;
    if (ctx.graph->state_kind() != kind)
        throw ConfigError("graph holds " + to_string(ctx.graph->state_kind()) + " states but the " +
                          to_string(ctx.env.variant) + " variant perceives " + to_string(kind) + " states");
    if (method == Method::mpc) ctx.cem.validate();
}

std::uint64_t eval_stream(const EvalSpec& spec, int k) {
    return derive_seed(spec.seed, spec.setting == Setting::complete ? "eval.complete" : "eval.partial",
                       static_cast<std::uint64_t>(k));
}

}  // namespace

EpisodeResult run_episode(const EvalContext& ctx, const EvalSpec& spec, int k, int seed_index, int episode) {
    EnvConfig cfg = ctx.env;
    cfg.object_count = k;
    const Environment env(cfg);
    const Perception perception(PerceptionConfig::for_env(cfg));
    const std::uint64_t stream = eval_stream(spec, k);
    const auto s = static_cast<std::uint64_t>(seed_index);
    const auto e = static_cast<std::uint64_t>(episode);
    auto [state, task] = env.reset(derive_seed(stream, "task", s, e), spec.setting);
    Rng policy_rng(derive_seed(stream, "policy", s, e));
    Rng noise_rng(derive_seed(stream, "noise", s, e));

    EpisodeResult r;
    r.unsat_initial = env.unsatisfied_count(state, task);
    if (r.unsat_initial == 0) throw std::logic_error("task starts solved");
    const int horizon = static_cast<int>(std::ceil(spec.horizon_multiplier * r.unsat_initial - 1e-9));
    const EntitySet goal = perception.perceive(task.goal);
    const Vec2 workspace = cfg.extent();

    std::optional<Controller> controller;
    if (spec.method == Method::ncs) controller.emplace(*ctx.graph, perception, ctx.controller, workspace);
    const RolloutModel model{ctx.graph, ctx.action_match_tol};

    int unsat = r.unsat_initial;
    for (int t = 0; t < horizon && unsat > 0; ++t) {
        Action a;
        switch (spec.method) {
            case Method::rand: a = random_policy(workspace, policy_rng); break;
            case Method::ncs: {
                const Decision d = controller->select_action(perception.perceive(env.render(state)), goal, policy_rng);
                if (d.fallback == Fallback::missing_edge) ++r.fallback_missing_edge;
                if (d.fallback == Fallback::bind_far || d.fallback == Fallback::cardinality_mismatch) ++r.fallback_bind;
                a = d.action;
                break;
            }
            case Method::nf: {
                const NfDecision d = nf_select_action(*ctx.set_graph, *ctx.graph, perception.perceive(env.render(state)),
                                                      goal, workspace, policy_rng);
                if (d.fallback == NfFallback::no_path) ++r.fallback_missing_edge;
                if (d.fallback == NfFallback::bind_fail) ++r.fallback_bind;
                a = d.action;
                break;
            }
            case Method::mpc: {
                CemParams p = ctx.cem;
                p.horizon = std::min(p.horizon, horizon - t);
                a = cem_plan(model, perception.perceive(env.render(state)), goal, p, workspace, policy_rng).action;
                break;
            }
        }
        if (spec.action_noise_std > 0) {
            a.w.x += spec.action_noise_std * noise_rng.normal();
            a.w.y += spec.action_noise_std * noise_rng.normal();
            a.dw.x += spec.action_noise_std * noise_rng.normal();
            a.dw.y += spec.action_noise_std * noise_rng.normal();
        }
        state = env.step(state, a);
        unsat = env.unsatisfied_count(state, task);
        ++r.steps;
    }
    r.unsat_final = unsat;
    r.fsr = fractional_success(r.unsat_initial, r.unsat_final);
    return r;
}

EvalReport evaluate(const EvalContext& ctx, const EvalSpec& spec) {
    spec.validate();
    check_context(ctx, spec.method);

    struct Item {
        int k, seed, episode;
    };
    std::vector<Item> items;
    for (int k : spec.object_counts)
        for (int s = 0; s < spec.seeds; ++s)
            for (int e = 0; e < spec.episodes; ++e) items.push_back({k, s, e});

    std::vector<EpisodeResult> results(items.size());
    std::vector<double> seconds(items.size(), 0.0);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const auto work = [&] {
        for (std::size_t i; !failed && (i = next++) < items.size();) {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                results[i] = run_episode(ctx, spec, items[i].k, items[i].seed, items[i].episode);
                if (spec.timing)
                    seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    const int threads = std::min<int>(spec.jobs, static_cast<int>(items.size()));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    // fixed-order reduction
    EvalReport report;
    std::size_t i = 0;
    for (int k : spec.object_counts) {
        EvalRow agg{spec.method, spec.setting, k, -1, spec.episodes * spec.seeds};
        std::vector<double> means;
        for (int s = 0; s < spec.seeds; ++s) {
            EvalRow row{spec.method, spec.setting, k, s, spec.episodes};
            double sum = 0.0;
            for (int e = 0; e < spec.episodes; ++e, ++i) {
                sum += results[i].fsr;
                row.fallback_missing_edge += results[i].fallback_missing_edge;
                row.fallback_bind += results[i].fallback_bind;
                row.wallclock_s += seconds[i];
            }
            row.mean_fsr = sum / spec.episodes;
            means.push_back(row.mean_fsr);
            agg.fallback_missing_edge += row.fallback_missing_edge;
            agg.fallback_bind += row.fallback_bind;
            agg.wallclock_s += row.wallclock_s;
            report.rows.push_back(row);
        }
        const double n = static_cast<double>(means.size());
        agg.mean_fsr = std::accumulate(means.begin(), means.end(), 0.0) / n;
        if (means.size() > 1) {
            double ss = 0.0;
            for (double m : means) ss += (m - agg.mean_fsr) * (m - agg.mean_fsr);
            agg.stderr_fsr = std::sqrt(ss / (n - 1)) / std::sqrt(n);
        }
        report.rows.push_back(agg);
    }
    return report;
}

std::string to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::clusters: return "clusters";
        case SweepAxis::buffer_fraction: return "buffer_fraction";
        case SweepAxis::noise_std: return "noise_std";
        case SweepAxis::horizon_multiplier: return "horizon_multiplier";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "clusters") return SweepAxis::clusters;
    if (s == "buffer_fraction") return SweepAxis::buffer_fraction;
    if (s == "noise_std") return SweepAxis::noise_std;
    if (s == "horizon_multiplier") return SweepAxis::horizon_multiplier;
    throw ConfigError("unknown sweep axis '" + s + "'");
}

std::vector<SweepPoint> sweep(const EvalContext& ctx, const EvalSpec& spec, const SweepInputs& inputs, SweepAxis axis,
                              const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    const bool rebuild = axis == SweepAxis::clusters || axis == SweepAxis::buffer_fraction;
    if (rebuild && !inputs.buffer) throw ConfigError("sweeping " + to_string(axis) + " needs the buffer");
    for (double v : values) {
        const bool ok = axis == SweepAxis::clusters            ? v >= 1 && v == std::floor(v)
                        : axis == SweepAxis::buffer_fraction    ? v > 0 && v <= 1
                        : axis == SweepAxis::noise_std          ? v >= 0
                                                                : v >= 1;
        if (!ok) throw ConfigError("invalid " + to_string(axis) + " value " + format_double(v));
    }

    std::vector<SweepPoint> out;
    const Perception perception(PerceptionConfig::for_env(inputs.buffer ? inputs.buffer->env : ctx.env));
    for (double v : values) {
        EvalSpec s = spec;
        EvalContext c = ctx;
        std::optional<TransitionGraph> graph;
        std::optional<SetGraph> set_graph;
        if (rebuild) {
            GraphConfig gc = inputs.graph_config;
            const ExperienceBuffer* buffer = inputs.buffer;
            std::optional<ExperienceBuffer> part;
            if (axis == SweepAxis::clusters) {
                gc.clusters = static_cast<int>(v);
            } else {
                part = inputs.buffer->prefix(v);
                buffer = &*part;
            }
            graph = build_graph(*buffer, perception, gc).graph;
            c.graph = &*graph;
            if (spec.method == Method::nf) {
                set_graph = nf_build(*buffer, perception, *graph);
                c.set_graph = &*set_graph;
            }
        } else if (axis == SweepAxis::noise_std) {
            s.action_noise_std = v;
        } else {
            s.horizon_multiplier = v;
        }
        out.push_back({v, evaluate(c, s)});
    }
    return out;
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepPoint>& points) {
    std::string out = "axis,value," + EvalReport::csv_header() + "\n";
    for (const auto& p : points)
        for (const auto& r : p.report.rows) out += to_string(axis) + "," + format_double(p.value) + "," + csv_row(r) + "\n";
    return out;
}

boost::multiprecision::cpp_int combinatorial_size(int locations, int k, int t) {
    if (locations < 0 || k < 0 || k > locations || t < 0)
        throw std::invalid_argument("combinatorial_size: need 0 <= k <= locations and t >= 0");
    using boost::multiprecision::cpp_int;
    cpp_int binom = 1;
    for (int i = 1; i <= k; ++i) binom = binom * (locations - k + i) / i;
    return binom * boost::multiprecision::pow(cpp_int(k) * (locations - k), static_cast<unsigned>(t));
}

std::optional<BfsResult> bfs_oracle(const Environment& env, const EnvState& initial, const Task& task) {
    const EnvConfig& cfg = env.config();
    if (cfg.variant != Variant::grid) throw std::invalid_argument("bfs_oracle: grid variant only");
    const double space = std::pow(static_cast<double>(cfg.location_count()), static_cast<double>(initial.objects.size()));
    if (space > 1e6) throw std::invalid_argument("bfs_oracle: state space too large for exhaustive search");

    using Key = std::vector<int>;
    struct Visit {
        Key parent;
        Action action;
    };
    std::map<Key, Visit> seen;
    std::deque<std::pair<Key, EnvState>> open;
    const Key start = occupied_cells(env, initial);
    seen[start] = {};
    open.emplace_back(start, initial);
    std::optional<Key> found;
    while (!open.empty()) {
        auto [key, state] = std::move(open.front());
        open.pop_front();
        if (env.unsatisfied_count(state, task) == 0) {
            found = key;
            break;
        }
        for (std::size_t i = 0; i < state.objects.size(); ++i) {
            const Vec2 w = state.objects[i].position;
            for (int cell = 0; cell < cfg.location_count(); ++cell) {
                const Action a{w, env.cell_center(cell) - w};
                EnvState next = env.step(state, a);
                next.step_count = 0;
                Key nk = occupied_cells(env, next);
                if (seen.count(nk)) continue;
                seen[nk] = {key, a};
                open.emplace_back(std::move(nk), std::move(next));
            }
        }
    }
    if (!found) return std::nullopt;
    BfsResult r;
    for (Key k = *found; k != start; k = seen[k].parent) r.actions.push_back(seen[k].action);
    std::reverse(r.actions.begin(), r.actions.end());
    r.moves = static_cast<int>(r.actions.size());
    return r;
}

}  // namespace rearrange
