#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rearrange/core.hpp"

namespace rearrange {

using Rgb8 = std::array<std::uint8_t, 3>;

/// Square RGB8 image, row-major, three bytes per pixel.
struct Raster {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;

    Raster() = default;
    Raster(std::uint32_t w, std::uint32_t h) : width(w), height(h), pixels(std::size_t{w} * h * 3, 0) {}

    std::size_t index(std::uint32_t x, std::uint32_t y) const { return (std::size_t{y} * width + x) * 3; }

    Rgb8 at(std::uint32_t x, std::uint32_t y) const {
        const auto i = index(x, y);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }

    void set(std::uint32_t x, std::uint32_t y, Rgb8 c) {
        const auto i = index(x, y);
        pixels[i] = c[0];
        pixels[i + 1] = c[1];
        pixels[i + 2] = c[2];
    }

    bool operator==(const Raster&) const = default;
};

/// Maps pixel coordinates to workspace units. Pixel (px, py) covers the
/// square [px, px+1) x [py, py+1) in pixel space; x runs along columns.
struct RasterGeometry {
    double pixels_per_unit = 64.0;

    Vec2 to_workspace(double px, double py) const { return {px / pixels_per_unit, py / pixels_per_unit}; }
    Vec2 pixel_center(std::uint32_t px, std::uint32_t py) const {
        return to_workspace(px + 0.5, py + 0.5);
    }
    double pixel_pitch() const { return 1.0 / pixels_per_unit; }
};

// "NCSR" header + u32 width + u32 height (little endian) + RGB8 bytes.
void write_raster(std::ostream& out, const Raster& raster);
Raster read_raster(std::istream& in);

namespace le {
void put_u32(std::ostream& out, std::uint32_t v);
void put_f64(std::ostream& out, double v);
std::uint32_t get_u32(std::istream& in);
double get_f64(std::istream& in);
}  // namespace le

}  // namespace rearrange
