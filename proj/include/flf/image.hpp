#pragma once

#include "flf/world.hpp"

#include <cstdint>
#include <vector>

namespace flf {

/// 8-bit RGB raster, interleaved row-major (y, x, channel).
struct Image {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(int h, int w, std::uint8_t fill = 0);

    std::uint8_t& at(int y, int x, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    [[nodiscard]] std::uint8_t at(int y, int x, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    [[nodiscard]] std::size_t raw_bytes() const { return pixels.size(); }

    bool operator==(const Image&) const = default;
};

struct Point {
    double y = 0.0;
    double x = 0.0;
};

/// round(clamp(v, 0, 1) * 255), halves away from zero.
std::uint8_t quantize(double v);

/// Channels 0..2 become R, G, B. Throws ChannelMismatch unless C == 3.
Image state_to_image(const WorldState& state);

/// Toroidal center of mass of the channel sum; the geometric center
/// (H/2, W/2) when the world is (nearly) empty.
Point mass_center(const WorldState& state);
/// Same, with pixel intensity summed over R, G, B as the mass.
Point mass_center(const Image& img);

/// Re-rasterizes onto (angle, radius) axes: output row j is the angle
/// 2*pi*j/H, column i the radius i*R_max/(W-1), R_max the half-diagonal.
/// Bilinear sampling; positions outside the input rectangle read 0.
/// Throws CenterOutOfBounds.
Image polar_resample(const Image& img, Point center);

/// Box-filters by 2^s along both axes, block means rounded half away from
/// zero. Throws IndivisibleScale unless 2^s divides H and W.
Image downsample(const Image& img, int s);

}  // namespace flf
