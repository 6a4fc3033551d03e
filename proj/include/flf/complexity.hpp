#pragma once

#include "flf/image.hpp"
#include "flf/png_codec.hpp"
#include "flf/world.hpp"

#include <iosfwd>
#include <vector>

namespace flf {

inline constexpr int kDefaultScales = 4;

/// values[s] is the inverse compression ratio at scale s (resolution 2^-s).
struct ComplexityProfile {
    std::vector<double> values;

    [[nodiscard]] int scales() const { return static_cast<int>(values.size()) - 1; }
    bool operator==(const ComplexityProfile&) const = default;
};

struct FitnessParams {
    double target = 0.5;  // T, in [0, 1]
    int scales = kDefaultScales;  // S >= 0
};

/// Encoded PNG length divided by the raw H*W*3 byte count.
double compression_complexity(const Image& img, const EncoderSettings& settings = {});

/// Per-scale complexities of an already-rasterized (and optionally polar) image.
ComplexityProfile image_profile(const Image& img, int scales, const EncoderSettings& settings = {});

/// state -> RGB -> polar about the mass center -> downsample(s) -> ratio,
/// for s = 0..scales. With `polar` false the Cartesian raster is used.
ComplexityProfile complexity_profile(const WorldState& state, int scales, bool polar = true,
                                     const EncoderSettings& settings = {});

/// Polar rendering used by the profile (the Cartesian one if `polar` is false).
Image assessed_image(const WorldState& state, bool polar = true);

/// Mean absolute deviation of the profile from `target`; lower is better.
/// Throws EmptyProfile.
double fitness(const ComplexityProfile& profile, double target);

/// CSV with header `scale,ratio`.
void write_profile_csv(std::ostream& out, const ComplexityProfile& profile);

}  // namespace flf
