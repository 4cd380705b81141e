#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rearrange/baselines.hpp"
#include "rearrange/buffer.hpp"
#include "rearrange/controller.hpp"
#include "rearrange/env.hpp"
#include "rearrange/graph.hpp"

namespace rearrange {

// ---- data ------------------------------------------------------------------

struct BufferSpec {
    int episodes = 5000;
    int episode_length = 5;  // observations per episode
    std::uint64_t seed = 0;
    // grid only: regenerate until every cell is both a source and a destination
    bool require_coverage = true;
};

/// Scripted data policy: each step moves a uniformly chosen object to a
/// uniformly chosen free cell (grid) or free point (table).
ExperienceBuffer generate_buffer(const EnvConfig& env, const BufferSpec& spec);

/// Whether every grid cell appears as a source and as a destination.
bool grid_coverage_complete(const ExperienceBuffer& buffer);

// ---- evaluation --------------------------------------------------------------

enum class Method { ncs, rand, nf, mpc };

std::string to_string(Method m);
Method parse_method(const std::string& s);

double fractional_success(int unsat_initial, int unsat_final);

struct EvalSpec {
    Method method = Method::ncs;
    Setting setting = Setting::complete;
    std::vector<int> object_counts{4, 5, 6, 7};
    int episodes = 100;
    int seeds = 10;
    double horizon_multiplier = 4.0;
    double action_noise_std = 0.0;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool timing = false;

    void validate() const;
};

/// Everything a policy may need. Pointers are borrowed; `graph` is required
/// for ncs, nf and mpc, `set_graph` for nf.
struct EvalContext {
    EnvConfig env;
    const TransitionGraph* graph = nullptr;
    const SetGraph* set_graph = nullptr;
    ControllerConfig controller;
    CemParams cem;
    double action_match_tol = 0.125;
};

struct EvalRow {
    Method method = Method::ncs;
    Setting setting = Setting::complete;
    int k = 0;
    int seed = -1;  // -1 marks the aggregate over seeds
    int episodes = 0;
    double mean_fsr = 0.0;
    double stderr_fsr = 0.0;
    std::size_t fallback_missing_edge = 0;
    std::size_t fallback_bind = 0;
    double wallclock_s = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;  // per seed rows followed by the aggregate, per k

    /// Aggregate row for k; throws std::out_of_range when absent.
    const EvalRow& aggregate(int k) const;
    static std::string csv_header();
    std::string csv() const;
};

std::string csv_row(const EvalRow& row);

struct EpisodeResult {
    int unsat_initial = 0;
    int unsat_final = 0;
    int steps = 0;
    double fsr = 0.0;
    std::size_t fallback_missing_edge = 0;
    std::size_t fallback_bind = 0;
};

/// One episode of `spec.method` on a fresh task of k objects. Task sampling
/// depends on (spec.seed, setting, k, seed_index, episode) only, so every
/// method faces the same tasks.
EpisodeResult run_episode(const EvalContext& ctx, const EvalSpec& spec, int k, int seed_index, int episode);

EvalReport evaluate(const EvalContext& ctx, const EvalSpec& spec);

// ---- sweeps ------------------------------------------------------------------

enum class SweepAxis { clusters, buffer_fraction, noise_std, horizon_multiplier };

std::string to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& s);

struct SweepPoint {
    double value = 0.0;
    EvalReport report;
};

struct SweepInputs {
    const ExperienceBuffer* buffer = nullptr;  // needed to rebuild graphs
    GraphConfig graph_config;
};

/// One evaluate per value. Axes that change construction rebuild the graph
/// (and the set graph for nf) from `inputs.buffer`.
std::vector<SweepPoint> sweep(const EvalContext& ctx, const EvalSpec& spec, const SweepInputs& inputs, SweepAxis axis,
                              const std::vector<double>& values);

std::string sweep_csv(SweepAxis axis, const std::vector<SweepPoint>& points);

// ---- combinatorics and oracles -------------------------------------------------

/// C(locations, k) * (k * (locations - k))^t.
boost::multiprecision::cpp_int combinatorial_size(int locations, int k, int t);

struct BfsResult {
    int moves = 0;
    std::vector<Action> actions;
};

/// Exhaustive breadth-first search over object configurations using the
/// environment's own step. Grid only, small instances. Returns nullopt
/// when the goal is unreachable.
std::optional<BfsResult> bfs_oracle(const Environment& env, const EnvState& initial, const Task& task);

}  // namespace rearrange
