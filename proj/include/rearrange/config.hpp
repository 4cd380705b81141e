#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rearrange/baselines.hpp"
#include "rearrange/controller.hpp"
#include "rearrange/env.hpp"
#include "rearrange/graph.hpp"
#include "rearrange/harness.hpp"

namespace rearrange {

struct ConfigKey {
    std::string name;
    std::string fallback;  // "auto" resolves per variant
    std::string help;
};

/// Flat run configuration covering env, buffer, graph, controller, planner
/// and evaluation settings. Values are kept as text; typed views resolve
/// "auto" entries against the chosen variant. All randomness derives from
/// the single `seed` key.
class RunConfig {
public:
    static const std::vector<ConfigKey>& keys();

    /// Throws ConfigError on an unknown key.
    void set(const std::string& key, const std::string& value);
    const std::string& raw(const std::string& key) const;
    /// Keys set by the caller, without fallbacks.
    const std::map<std::string, std::string>& explicit_values() const { return values_; }

    static RunConfig from_text(std::string_view text);
    static RunConfig load(const std::string& path);

    /// Every key with its resolved value, in declaration order.
    std::string to_text() const;

    std::uint64_t seed() const;
    EnvConfig env() const;
    BufferSpec buffer() const;
    GraphConfig graph() const;
    ControllerConfig controller() const;
    CemParams cem() const;
    EvalSpec eval() const;
    double action_match_tol() const;

    /// Checks every typed view; throws ConfigError.
    void validate() const;

private:
    std::map<std::string, std::string> values_;
};

std::vector<int> parse_int_list(const std::string& key, const std::string& value);
std::vector<double> parse_double_list(const std::string& key, const std::string& value);

}  // namespace rearrange
