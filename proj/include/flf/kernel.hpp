#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace flf {

/// One Gaussian shell of a radial kernel, on the normalized radius u = d / (R*r).
struct Ring {
    double center = 0.5;  // a, in [0, 1]
    double height = 0.0;  // b, in [0, 1]
    double width = 0.15;  // w, in [0.01, 0.5]
};

struct KernelSpec {
    double r = 1.0;  // relative radius, (0, 1]
    std::array<Ring, 3> rings{};
    double h = 1.0;       // affinity weight, [0, 1]
    double mu = 0.15;     // growth center, [0.05, 0.5]
    double sigma = 0.015; // growth width, [0.001, 0.18]
    int src = 0;
    int dst = 0;

    /// Throws InvalidArgument when a field is outside its bounds or the wiring
    /// does not fit `channels`.
    void validate(int channels) const;
};

/// Discretized, L1-normalized radial kernel plus its spectrum at world size.
class KernelField {
public:
    [[nodiscard]] int radius() const { return radius_; }
    /// Side length of the square support, 2*radius + 1.
    [[nodiscard]] int side() const { return 2 * radius_ + 1; }
    /// Row-major side x side weights, center at (radius, radius).
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] double value(int dy, int dx) const {
        return values_[static_cast<std::size_t>(dy + radius_) * side() + (dx + radius_)];
    }

    [[nodiscard]] int world_height() const { return world_height_; }
    [[nodiscard]] int world_width() const { return world_width_; }
    /// Half spectrum of the wrapped kernel, pre-scaled by 1/(H*W) so that an
    /// unnormalized inverse transform yields the convolution directly.
    [[nodiscard]] std::span<const std::complex<double>> spectrum() const { return spectrum_; }

private:
    friend KernelField build_kernel(double R, const KernelSpec& spec, int world_height, int world_width);

    int radius_ = 0;
    std::vector<double> values_;
    int world_height_ = 0;
    int world_width_ = 0;
    std::vector<std::complex<double>> spectrum_;
};

/// Unnormalized shell profile at normalized radius u (0 beyond u = 1).
double kernel_profile(const KernelSpec& spec, double u);

/// Builds the kernel of radius R * spec.r cells for an H x W torus.
/// Requires R * spec.r >= 1 and a support that fits the world.
/// Throws ZeroKernel when every weight vanishes.
KernelField build_kernel(double R, const KernelSpec& spec, int world_height, int world_width);

}  // namespace flf
