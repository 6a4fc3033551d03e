#include "flf/kernel.hpp"

#include "flf/errors.hpp"
#include "flf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flf {

namespace {

void check_range(double v, double lo, double hi, const char* name) {
    if (!(v >= lo && v <= hi)) {
        throw InvalidArgument(std::string("kernel field ") + name + " = " + std::to_string(v) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

}  // namespace

void KernelSpec::validate(int channels) const {
    if (!(r > 0.0 && r <= 1.0)) {
        throw InvalidArgument("kernel relative radius must lie in (0, 1]");
    }
    for (const Ring& ring : rings) {
        check_range(ring.center, 0.0, 1.0, "a");
        check_range(ring.height, 0.0, 1.0, "b");
        check_range(ring.width, 0.01, 0.5, "w");
    }
    check_range(h, 0.0, 1.0, "h");
    check_range(mu, 0.05, 0.5, "mu");
    check_range(sigma, 0.001, 0.18, "sigma");
    if (src < 0 || src >= channels || dst < 0 || dst >= channels) {
        throw InvalidArgument("kernel wiring outside channel range");
    }
}

double kernel_profile(const KernelSpec& spec, double u) {
    if (u > 1.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (const Ring& ring : spec.rings) {
        const double z = (u - ring.center) / ring.width;
        sum += ring.height * std::exp(-0.5 * z * z);
    }
    return sum;
}

KernelField build_kernel(double R, const KernelSpec& spec, int world_height, int world_width) {
    const double radius_cells = R * spec.r;
    if (!(radius_cells >= 1.0 - 1e-9)) {
        throw InvalidArgument("kernel radius R*r must be at least one cell");
    }
    for (const Ring& ring : spec.rings) {
        if (!(ring.width > 0.0) || ring.height < 0.0) {
            throw InvalidArgument("ring width must be positive and height non-negative");
        }
    }

    KernelField k;
    k.radius_ = std::max(1, static_cast<int>(std::ceil(radius_cells - 1e-9)));
    const int side = k.side();
    if (side > world_height || side > world_width) {
        throw DimensionMismatch("kernel support " + std::to_string(side) + " exceeds world " +
                                std::to_string(world_height) + "x" + std::to_string(world_width));
    }

    k.values_.assign(static_cast<std::size_t>(side) * side, 0.0);
    double total = 0.0;
    for (int dy = -k.radius_; dy <= k.radius_; ++dy) {
        for (int dx = -k.radius_; dx <= k.radius_; ++dx) {
            const double u = std::sqrt(static_cast<double>(dy * dy + dx * dx)) / radius_cells;
            const double v = kernel_profile(spec, u);
            k.values_[static_cast<std::size_t>(dy + k.radius_) * side + (dx + k.radius_)] = v;
            total += v;
        }
    }
    if (!(total > 0.0)) {
        throw ZeroKernel("kernel has no positive weight inside its radius");
    }
    for (double& v : k.values_) {
        v /= total;
    }

    k.world_height_ = world_height;
    k.world_width_ = world_width;
    std::vector<double> wrapped(static_cast<std::size_t>(world_height) * world_width, 0.0);
    for (int dy = -k.radius_; dy <= k.radius_; ++dy) {
        const int y = (dy + world_height) % world_height;
        for (int dx = -k.radius_; dx <= k.radius_; ++dx) {
            const int x = (dx + world_width) % world_width;
            wrapped[static_cast<std::size_t>(y) * world_width + x] += k.value(dy, dx);
        }
    }
    SpectralPlan& plan = SpectralPlan::local(world_height, world_width);
    k.spectrum_.resize(plan.spectrum_size());
    plan.forward(wrapped, k.spectrum_);
    const double scale = 1.0 / (static_cast<double>(world_height) * world_width);
    for (auto& c : k.spectrum_) {
        c *= scale;
    }
    return k;
}

}  // namespace flf
