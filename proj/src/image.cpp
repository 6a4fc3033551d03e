#include "flf/image.hpp"

#include "flf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace flf {

Image::Image(int h, int w, std::uint8_t fill) : height(h), width(w) {
    if (h <= 0 || w <= 0) {
        throw InvalidArgument("image dimensions must be positive");
    }
    pixels.assign(static_cast<std::size_t>(h) * w * 3, fill);
}

std::uint8_t quantize(double v) {
    const double clamped = std::clamp(std::isnan(v) ? 0.0 : v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::round(clamped * 255.0));
}

Image state_to_image(const WorldState& state) {
    if (state.channels != 3) {
        throw ChannelMismatch("image rendering needs exactly 3 channels, state has " +
                              std::to_string(state.channels));
    }
    Image img(state.height, state.width);
    for (int y = 0; y < state.height; ++y) {
        for (int x = 0; x < state.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                img.at(y, x, c) = quantize(state.at(y, x, c));
            }
        }
    }
    return img;
}

namespace {

// Circular mean of positions 0..n-1 weighted by `mass`.
double circular_mean(const std::vector<double>& mass, double total) {
    const auto n = static_cast<double>(mass.size());
    double c = 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] == 0.0) {
            continue;
        }
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / n;
        c += mass[i] * std::cos(theta);
        s += mass[i] * std::sin(theta);
    }
    if (std::hypot(c, s) < 1e-12 * total) {
        return n / 2.0;  // no preferred position on this axis
    }
    double pos = std::atan2(s, c) * n / (2.0 * std::numbers::pi);
    if (pos < 0.0) {
        pos += n;
    }
    return pos >= n ? 0.0 : pos;
}

Point center_from_marginals(const std::vector<double>& rows, const std::vector<double>& cols, int h, int w) {
    double total = 0.0;
    for (double m : rows) {
        total += m;
    }
    if (!(total >= 1e-9)) {
        return {h / 2.0, w / 2.0};
    }
    return {circular_mean(rows, total), circular_mean(cols, total)};
}

}  // namespace

Point mass_center(const WorldState& state) {
    std::vector<double> rows(state.height, 0.0);
    std::vector<double> cols(state.width, 0.0);
    for (int c = 0; c < state.channels; ++c) {
        for (int y = 0; y < state.height; ++y) {
            for (int x = 0; x < state.width; ++x) {
                const double m = state.at(y, x, c);
                rows[y] += m;
                cols[x] += m;
            }
        }
    }
    return center_from_marginals(rows, cols, state.height, state.width);
}

Point mass_center(const Image& img) {
    std::vector<double> rows(img.height, 0.0);
    std::vector<double> cols(img.width, 0.0);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double m = img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2);
            rows[y] += m;
            cols[x] += m;
        }
    }
    return center_from_marginals(rows, cols, img.height, img.width);
}

Image polar_resample(const Image& img, Point center) {
    const int h = img.height;
    const int w = img.width;
    if (!(center.y >= 0.0 && center.y < h && center.x >= 0.0 && center.x < w)) {
        throw CenterOutOfBounds("polar center (" + std::to_string(center.y) + ", " + std::to_string(center.x) +
                                ") outside the image");
    }
    const double r_max = std::sqrt(static_cast<double>(h) * h + static_cast<double>(w) * w) / 2.0;
    const double dr = w > 1 ? r_max / (w - 1) : 0.0;
    Image out(h, w);
    for (int j = 0; j < h; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / h;
        const double sin_t = std::sin(theta);
        const double cos_t = std::cos(theta);
        for (int i = 0; i < w; ++i) {
            const double rho = i * dr;
            const double py = center.y + rho * sin_t;
            const double px = center.x + rho * cos_t;
            if (!(py >= 0.0 && py <= h - 1 && px >= 0.0 && px <= w - 1)) {
                continue;  // stays 0
            }
            const int y0 = static_cast<int>(py);
            const int x0 = static_cast<int>(px);
            const int y1 = std::min(y0 + 1, h - 1);
            const int x1 = std::min(x0 + 1, w - 1);
            const double fy = py - y0;
            const double fx = px - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = (1.0 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
                const double bottom = (1.0 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
                const double v = (1.0 - fy) * top + fy * bottom;
                out.at(j, i, c) = static_cast<std::uint8_t>(std::min(255.0, std::round(v)));
            }
        }
    }
    return out;
}

Image downsample(const Image& img, int s) {
    if (s < 0 || s > 30) {
        throw IndivisibleScale("scale must lie in [0, 30]");
    }
    const int f = 1 << s;
    if (img.height % f != 0 || img.width % f != 0) {
        throw IndivisibleScale("2^" + std::to_string(s) + " does not divide " + std::to_string(img.height) + "x" +
                               std::to_string(img.width));
    }
    if (f == 1) {
        return img;
    }
    const int oh = img.height / f;
    const int ow = img.width / f;
    const std::uint64_t n = static_cast<std::uint64_t>(f) * f;
    Image out(oh, ow);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            for (int c = 0; c < 3; ++c) {
                std::uint64_t sum = 0;
                for (int y = oy * f; y < (oy + 1) * f; ++y) {
                    for (int x = ox * f; x < (ox + 1) * f; ++x) {
                        sum += img.at(y, x, c);
                    }
                }
                // floor(sum / n + 1/2) == round-half-away for non-negative means
                out.at(oy, ox, c) = static_cast<std::uint8_t>((2 * sum + n) / (2 * n));
            }
        }
    }
    return out;
}

}  // namespace flf
