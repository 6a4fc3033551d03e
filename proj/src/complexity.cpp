#include "flf/complexity.hpp"

#include "flf/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace flf {

double compression_complexity(const Image& img, const EncoderSettings& settings) {
    const auto encoded = encode_png(img, settings);
    return static_cast<double>(encoded.size()) / static_cast<double>(img.raw_bytes());
}

ComplexityProfile image_profile(const Image& img, int scales, const EncoderSettings& settings) {
    if (scales < 0) {
        throw InvalidArgument("scale count must be non-negative");
    }
    const int f = scales < 31 ? 1 << scales : 0;
    if (f == 0 || img.height % f != 0 || img.width % f != 0) {
        throw IndivisibleScale("2^" + std::to_string(scales) + " must divide the image dimensions " +
                               std::to_string(img.height) + "x" + std::to_string(img.width));
    }
    ComplexityProfile profile;
    profile.values.reserve(scales + 1);
    for (int s = 0; s <= scales; ++s) {
        profile.values.push_back(compression_complexity(downsample(img, s), settings));
    }
    return profile;
}

Image assessed_image(const WorldState& state, bool polar) {
    Image img = state_to_image(state);
    if (polar) {
        img = polar_resample(img, mass_center(state));
    }
    return img;
}

ComplexityProfile complexity_profile(const WorldState& state, int scales, bool polar,
                                     const EncoderSettings& settings) {
    return image_profile(assessed_image(state, polar), scales, settings);
}

double fitness(const ComplexityProfile& profile, double target) {
    if (profile.values.empty()) {
        throw EmptyProfile("fitness of an empty complexity profile");
    }
    double sum = 0.0;
    for (double c : profile.values) {
        sum += std::abs(c - target);
    }
    return sum / static_cast<double>(profile.values.size());
}

void write_profile_csv(std::ostream& out, const ComplexityProfile& profile) {
    out << "scale,ratio\n";
    char buf[64];
    for (std::size_t s = 0; s < profile.values.size(); ++s) {
        std::snprintf(buf, sizeof buf, "%zu,%.9f\n", s, profile.values[s]);
        out << buf;
    }
}

}  // namespace flf
