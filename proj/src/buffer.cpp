#include "rearrange/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <streambuf>

#include "rearrange/keyvalue.hpp"

namespace rearrange {

namespace {

constexpr std::uint32_t kVersion = 1;

class HashBuf : public std::streambuf {
public:
    Fnv1a hash;

protected:
    int_type overflow(int_type ch) override {
        if (ch != traits_type::eof()) {
            const char c = static_cast<char>(ch);
            hash.update(&c, 1);
        }
        return ch;
    }
    std::streamsize xsputn(const char* s, std::streamsize n) override {
        hash.update(s, static_cast<std::size_t>(n));
        return n;
    }
};

void put_action(std::ostream& out, const Action& a) {
    le::put_f64(out, a.w.x);
    le::put_f64(out, a.w.y);
    le::put_f64(out, a.dw.x);
    le::put_f64(out, a.dw.y);
}

Action get_action(std::istream& in) {
    Action a;
    a.w.x = le::get_f64(in);
    a.w.y = le::get_f64(in);
    a.dw.x = le::get_f64(in);
    a.dw.y = le::get_f64(in);
    return a;
}

}  // namespace

std::size_t ExperienceBuffer::transition_count() const {
    std::size_t n = 0;
    for (const auto& e : episodes) n += e.transition_count();
    return n;
}

std::string ExperienceBuffer::digest() const {
    HashBuf buf;
    std::ostream out(&buf);
    write_buffer(out, *this);
    return buf.hash.hex();
}

ExperienceBuffer ExperienceBuffer::prefix(double fraction) const {
    ExperienceBuffer out{env, seed, {}};
    const auto n = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(fraction * episodes.size())), 1,
                                           episodes.size());
    out.episodes.assign(episodes.begin(), episodes.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

void write_buffer(std::ostream& out, const ExperienceBuffer& buffer) {
    auto kv = env_config_to_kv(buffer.env);
    kv.emplace_back("seed", std::to_string(buffer.seed));
    const std::string header = format_key_values(kv);
    out.write("NCSB", 4);
    le::put_u32(out, kVersion);
    le::put_u32(out, static_cast<std::uint32_t>(header.size()));
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    le::put_u32(out, static_cast<std::uint32_t>(buffer.episodes.size()));
    for (const auto& ep : buffer.episodes) {
        le::put_u32(out, static_cast<std::uint32_t>(ep.actions.size()));
        for (std::size_t t = 0; t < ep.actions.size(); ++t) {
            write_raster(out, ep.observations[t]);
            put_action(out, ep.actions[t]);
        }
        write_raster(out, ep.observations.back());
    }
}

ExperienceBuffer read_buffer(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "NCSB", 4) != 0) throw FormatError("format error: bad buffer magic");
    const auto version = le::get_u32(in);
    if (version != kVersion) throw FormatError("format error: unsupported buffer version " + std::to_string(version));
    const auto header_len = le::get_u32(in);
    if (header_len > (1u << 20)) throw FormatError("format error: header too large");
    std::string header(header_len, '\0');
    if (!in.read(header.data(), header_len)) throw FormatError("format error: truncated header");

    ExperienceBuffer buffer;
    try {
        auto kv = parse_key_values(header);
        std::string env_text;
        for (const auto& [k, v] : kv) {
            if (k == "seed") buffer.seed = parse_u64(k, v);
            else env_text += k + " = " + v + "\n";
        }
        buffer.env = env_config_from_text(env_text);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("format error: bad buffer header: ") + e.what());
    }

    const auto episodes = le::get_u32(in);
    buffer.episodes.reserve(episodes);
    const auto size = static_cast<std::uint32_t>(buffer.env.image_size);
    const auto check = [size](const Raster& r) {
        if (r.width != size || r.height != size) throw FormatError("format error: raster size does not match config");
    };
    for (std::uint32_t e = 0; e < episodes; ++e) {
        Episode ep;
        const auto steps = le::get_u32(in);
        if (steps == 0 || steps > 100000) throw FormatError("format error: bad transition count");
        for (std::uint32_t t = 0; t < steps; ++t) {
            ep.observations.push_back(read_raster(in));
            check(ep.observations.back());
            ep.actions.push_back(get_action(in));
        }
        ep.observations.push_back(read_raster(in));
        check(ep.observations.back());
        buffer.episodes.push_back(std::move(ep));
    }
    return buffer;
}

void save_buffer(const std::string& path, const ExperienceBuffer& buffer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    write_buffer(out, buffer);
    out.flush();
    if (!out) throw std::ios_base::failure("write to '" + path + "' failed");
}

ExperienceBuffer load_buffer(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "'");
    return read_buffer(in);
}

}  // namespace rearrange
