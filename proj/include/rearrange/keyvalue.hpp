#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rearrange/env.hpp"

namespace rearrange {

/// Ordered `key = value` pairs. Blank lines and `#` comments are skipped.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues parse_key_values(std::string_view text);
std::string format_key_values(const KeyValues& kv);

// Shortest round-trip formatting and strict parsing.
std::string format_double(double v);
double parse_double(const std::string& key, const std::string& value);
std::int64_t parse_int(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);

/// EnvConfig as a flat key-value block; unknown keys are a ConfigError.
KeyValues env_config_to_kv(const EnvConfig& c);
/// Applies one key; returns false if the key is not an EnvConfig key.
bool apply_env_key(EnvConfig& c, const std::string& key, const std::string& value);
EnvConfig env_config_from_text(std::string_view text);

}  // namespace rearrange
