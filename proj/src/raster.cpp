#include "rearrange/raster.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

namespace rearrange {

std::string Fnv1a::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
}

namespace le {

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("format error: unexpected end of data");
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError("format error: unexpected end of data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t{b[i]} << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace le

void write_raster(std::ostream& out, const Raster& raster) {
    out.write("NCSR", 4);
    le::put_u32(out, raster.width);
    le::put_u32(out, raster.height);
    out.write(reinterpret_cast<const char*>(raster.pixels.data()),
              static_cast<std::streamsize>(raster.pixels.size()));
}

Raster read_raster(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "NCSR", 4) != 0)
        throw FormatError("format error: bad raster magic");
    const auto w = le::get_u32(in);
    const auto h = le::get_u32(in);
    if (w == 0 || h == 0 || w > 16384 || h > 16384) throw FormatError("format error: bad raster dimensions");
    Raster r(w, h);
    if (!in.read(reinterpret_cast<char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size())))
        throw FormatError("format error: truncated raster");
    return r;
}

}  // namespace rearrange
