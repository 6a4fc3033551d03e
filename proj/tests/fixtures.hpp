#pragma once

// Synthetic test images shared by the unit and acceptance tests.

#include "flf/image.hpp"
#include "flf/rng.hpp"

#include <cmath>
#include <numbers>

namespace flf::fixture {

inline Image constant_image(int h, int w, std::uint8_t v) { return Image(h, w, v); }

inline Image noise_image(int h, int w, std::uint64_t seed) {
    Image img(h, w);
    Rng rng(seed);
    for (auto& p : img.pixels) {
        p = static_cast<std::uint8_t>(rng.below(256));
    }
    return img;
}

/// Concentric rings about (cy, cx) with the given radial period, a different
/// phase per color channel.
inline Image ring_image(int h, int w, double cy, double cx, double period) {
    Image img(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double r = std::hypot(y - cy, x - cx);
            for (int c = 0; c < 3; ++c) {
                const double v = 127.5 + 127.5 * std::cos(2.0 * std::numbers::pi * r / period + 2.0 * c);
                img.at(y, x, c) = static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
    return img;
}

/// Smooth gradients with a few hard-edged discs: more structure than a flat
/// image, far less than noise.
inline Image structured_image(int h, int w) {
    Image img(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(y, x, 0) = static_cast<std::uint8_t>(255 * x / (w - 1));
            img.at(y, x, 1) = static_cast<std::uint8_t>(255 * y / (h - 1));
            img.at(y, x, 2) = static_cast<std::uint8_t>(127.5 + 127.5 * std::sin(x * 0.11) * std::cos(y * 0.07));
            for (int k = 0; k < 6; ++k) {
                const double dy = y - h * (0.15 + 0.13 * k);
                const double dx = x - w * (0.8 - 0.11 * k);
                if (dy * dy + dx * dx < (8.0 + 3 * k) * (8.0 + 3 * k)) {
                    img.at(y, x, k % 3) = static_cast<std::uint8_t>(40 * k);
                }
            }
        }
    }
    return img;
}

}  // namespace flf::fixture
