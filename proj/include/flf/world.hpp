#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace flf {

/// Stack of C real-valued H x W planes, stored plane-major: index (c, y, x).
struct Planes {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> values;

    Planes() = default;
    Planes(int h, int w, int c, double fill = 0.0);

    [[nodiscard]] std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }

    std::span<double> plane(int c) { return {values.data() + c * plane_size(), plane_size()}; }
    [[nodiscard]] std::span<const double> plane(int c) const {
        return {values.data() + c * plane_size(), plane_size()};
    }

    double& at(int y, int x, int c) { return values[(c * plane_size()) + static_cast<std::size_t>(y) * width + x]; }
    [[nodiscard]] double at(int y, int x, int c) const {
        return values[(c * plane_size()) + static_cast<std::size_t>(y) * width + x];
    }

    [[nodiscard]] bool same_shape(const Planes& other) const {
        return height == other.height && width == other.width && channels == other.channels;
    }

    bool operator==(const Planes&) const = default;
};

/// Channel-wise affinity (U) or any other signed per-channel field.
using ChannelField = Planes;

/// H x W x C grid of non-negative mass densities.
struct WorldState : Planes {
    using Planes::Planes;

    [[nodiscard]] double total_mass() const;
    [[nodiscard]] double channel_mass(int c) const;
    /// Every cell finite and >= 0.
    [[nodiscard]] bool valid() const;
};

/// Circularly shift every plane by (dy, dx) cells.
WorldState shifted(const WorldState& state, int dy, int dx);

// Binary state file: "FLST", u32 version=1, u32 H, u32 W, u32 C, then H*W*C
// little-endian float32 in (y, x, c) order.
inline constexpr std::uint32_t kStateFileVersion = 1;

void write_state(std::ostream& out, const WorldState& state);
WorldState read_state(std::istream& in);
void save_state(const std::filesystem::path& path, const WorldState& state);
WorldState load_state(const std::filesystem::path& path);

}  // namespace flf
