#include "rearrange/keyvalue.hpp"

#include <charconv>
#include <cmath>

namespace rearrange {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
    KeyValues out;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
    }
    return out;
}

std::string format_key_values(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& value) {
    double v = 0.0;
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v))
        throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    std::int64_t v = 0;
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError("'" + key + "': expected an integer, got '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto* end = value.data() + value.size();
    const auto res = std::from_chars(value.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError("'" + key + "': expected an unsigned integer, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("'" + key + "': expected true or false, got '" + value + "'");
}

KeyValues env_config_to_kv(const EnvConfig& c) {
    return {
        {"variant", to_string(c.variant)},
        {"grid_side", std::to_string(c.grid_side)},
        {"table_width", format_double(c.table_width)},
        {"table_height", format_double(c.table_height)},
        {"object_count", std::to_string(c.object_count)},
        {"image_size", std::to_string(c.image_size)},
        {"pick_threshold", format_double(c.pick_threshold)},
        {"place_threshold", format_double(c.place_threshold)},
        {"palette_size", std::to_string(c.palette_size)},
        {"footprint_radius", format_double(c.footprint_radius)},
        {"min_separation", format_double(c.min_separation)},
    };
}

bool apply_env_key(EnvConfig& c, const std::string& key, const std::string& value) {
    const auto as_int = [&] { return static_cast<int>(parse_int(key, value)); };
    if (key == "variant") c.variant = parse_variant(value);
    else if (key == "grid_side") c.grid_side = as_int();
    else if (key == "table_width") c.table_width = parse_double(key, value);
    else if (key == "table_height") c.table_height = parse_double(key, value);
    else if (key == "object_count") c.object_count = as_int();
    else if (key == "image_size") c.image_size = as_int();
    else if (key == "pick_threshold") c.pick_threshold = parse_double(key, value);
    else if (key == "place_threshold") c.place_threshold = parse_double(key, value);
    else if (key == "palette_size") c.palette_size = as_int();
    else if (key == "footprint_radius") c.footprint_radius = parse_double(key, value);
    else if (key == "min_separation") c.min_separation = parse_double(key, value);
    else return false;
    return true;
}

EnvConfig env_config_from_text(std::string_view text) {
    const auto kv = parse_key_values(text);
    EnvConfig c;
    // variant first so its defaults do not clobber explicit thresholds
    for (const auto& [k, v] : kv)
        if (k == "variant") c = parse_variant(v) == Variant::grid ? EnvConfig::grid_defaults() : EnvConfig::table_defaults();
    for (const auto& [k, v] : kv)
        if (!apply_env_key(c, k, v)) throw ConfigError("unknown env config key '" + k + "'");
    c.validate();
    return c;
}

}  // namespace rearrange
