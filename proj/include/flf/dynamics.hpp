#pragma once

#include "flf/kernel.hpp"
#include "flf/world.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace flf {

inline constexpr int kKernelCount = 12;
inline constexpr int kDefaultChannels = 3;

/// Non-evolved constants of the flow update.
struct DynamicsParams {
    double dt = 0.2;
    double theta_A = 2.0;  // crowding threshold
    double n_alpha = 2.0;  // crowding exponent
    double ell = 0.5;      // reintegration half-width, cells
    double d_max = 1.0;    // per-axis displacement clamp, cells
};

struct UpdateRule {
    double R = 10.0;  // global kernel radius scale, cells, [2, 25]
    std::vector<KernelSpec> kernels;
    DynamicsParams dynamics;

    /// Checks bounds for a world of the given shape; throws InvalidArgument.
    void validate(int height, int width, int channels) const;
};

/// An UpdateRule with every kernel discretized for one world size.
///
/// Kernels whose weights vanish are kept as `std::nullopt` and contribute no
/// affinity. A compiled rule is immutable and may be shared across threads.
class CompiledRule {
public:
    CompiledRule(const UpdateRule& rule, int height, int width, int channels);

    [[nodiscard]] const UpdateRule& rule() const { return rule_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int channels() const { return channels_; }
    [[nodiscard]] const std::vector<std::optional<KernelField>>& kernels() const { return fields_; }
    [[nodiscard]] int degenerate_count() const;
    /// True when every kernel is degenerate (the rule has no dynamics).
    [[nodiscard]] bool degenerate() const { return degenerate_count() == static_cast<int>(fields_.size()); }

private:
    UpdateRule rule_;
    int height_;
    int width_;
    int channels_;
    std::vector<std::optional<KernelField>> fields_;
};

/// Per-channel displacement, x component in `dx` and y component in `dy`.
struct Displacement {
    Planes dx;
    Planes dy;
};

/// Toroidal convolution through the kernel's precomputed spectrum.
std::vector<double> convolve(std::span<const double> field, int height, int width, const KernelField& kernel);

double growth(double u, double mu, double sigma);
std::vector<double> growth(std::span<const double> u, double mu, double sigma);

ChannelField affinity(const WorldState& state, const CompiledRule& rule);

Displacement flow_field(const ChannelField& U, const WorldState& state, const DynamicsParams& params);

/// Reintegration tracking: each cell's mass travels as a 2*ell square and is
/// split over the cells it overlaps. Throws DisplacementTooLarge when any
/// component exceeds d_max.
WorldState advect(const WorldState& state, const Displacement& D, double ell, double d_max);

WorldState step(const WorldState& state, const CompiledRule& rule);
WorldState step(const WorldState& state, const UpdateRule& rule);

WorldState run(const CompiledRule& rule, WorldState init, int steps);

/// Centered patch_side x patch_side block of i.i.d. U[0,1) values per channel.
WorldState init_state(std::uint64_t seed, int height, int width, int channels, int patch_side = 64);

/// Reusable buffers for repeated steps of one rule; one instance per thread.
class Simulator {
public:
    explicit Simulator(const CompiledRule& rule);

    void step(WorldState& state);
    void run(WorldState& state, int steps);

private:
    const CompiledRule& rule_;
    std::vector<std::vector<std::complex<double>>> source_spectra_;
    std::vector<std::complex<double>> product_;
    std::vector<double> potential_;
    ChannelField affinity_;
    Displacement displacement_;
    WorldState next_;
};

}  // namespace flf
