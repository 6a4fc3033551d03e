#include "flf/dynamics.hpp"

#include "flf/errors.hpp"
#include "flf/rng.hpp"
#include "flf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flf {

namespace {

// Plain complex product; std::complex's operator* takes the slow
// Annex G path for inf/nan handling.
void multiply_spectra(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b,
                      std::span<std::complex<double>> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double ar = a[i].real();
        const double ai = a[i].imag();
        const double br = b[i].real();
        const double bi = b[i].imag();
        out[i] = {ar * br - ai * bi, ar * bi + ai * br};
    }
}

}  // namespace

void UpdateRule::validate(int height, int width, int channels) const {
    if (height <= 0 || width <= 0 || channels <= 0) {
        throw InvalidArgument("world dimensions must be positive");
    }
    if (!(R >= 2.0 && R <= 25.0)) {
        throw InvalidArgument("R = " + std::to_string(R) + " outside [2, 25]");
    }
    if (kernels.empty()) {
        throw InvalidArgument("update rule has no kernels");
    }
    for (const KernelSpec& k : kernels) {
        k.validate(channels);
    }
    const DynamicsParams& d = dynamics;
    if (!(d.dt > 0.0)) {
        throw InvalidArgument("dt must be positive");
    }
    if (!(d.ell > 0.0 && d.ell <= 0.5)) {
        throw InvalidArgument("ell must lie in (0, 0.5]");
    }
    if (!(d.d_max > 0.0 && d.d_max <= std::min(height, width) / 4.0)) {
        throw InvalidArgument("d_max must lie in (0, min(H, W)/4]");
    }
    if (!(d.theta_A > 0.0) || !(d.n_alpha > 0.0)) {
        throw InvalidArgument("theta_A and n_alpha must be positive");
    }
}

CompiledRule::CompiledRule(const UpdateRule& rule, int height, int width, int channels)
    : rule_(rule), height_(height), width_(width), channels_(channels) {
    rule_.validate(height, width, channels);
    fields_.reserve(rule_.kernels.size());
    for (const KernelSpec& spec : rule_.kernels) {
        // A sub-cell radius would leave only the center tap; lift it to one cell.
        const double scale = std::max(rule_.R, 1.0 / spec.r);
        try {
            fields_.emplace_back(build_kernel(scale, spec, height, width));
        } catch (const ZeroKernel&) {
            fields_.emplace_back(std::nullopt);
        }
    }
}

int CompiledRule::degenerate_count() const {
    return static_cast<int>(std::count_if(fields_.begin(), fields_.end(), [](const auto& f) { return !f; }));
}

std::vector<double> convolve(std::span<const double> field, int height, int width, const KernelField& kernel) {
    if (height != kernel.world_height() || width != kernel.world_width() ||
        field.size() != static_cast<std::size_t>(height) * width) {
        throw DimensionMismatch("field shape differs from the kernel's world size");
    }
    SpectralPlan& plan = SpectralPlan::local(height, width);
    std::vector<std::complex<double>> spectrum(plan.spectrum_size());
    plan.forward(field, spectrum);
    const auto ks = kernel.spectrum();
    multiply_spectra(spectrum, ks, spectrum);
    std::vector<double> out(field.size());
    plan.inverse(spectrum, out);
    return out;
}

double growth(double u, double mu, double sigma) {
    const double z = (u - mu) / sigma;
    return 2.0 * std::exp(-0.5 * z * z) - 1.0;
}

std::vector<double> growth(std::span<const double> u, double mu, double sigma) {
    std::vector<double> out(u.size());
    std::transform(u.begin(), u.end(), out.begin(), [=](double v) { return growth(v, mu, sigma); });
    return out;
}

namespace {

void check_state_shape(const WorldState& state, const CompiledRule& rule) {
    if (state.height != rule.height() || state.width != rule.width() || state.channels != rule.channels()) {
        throw DimensionMismatch("state shape differs from the compiled rule's world");
    }
}

void affinity_into(const WorldState& state, const CompiledRule& rule,
                   std::vector<std::vector<std::complex<double>>>& source_spectra,
                   std::vector<std::complex<double>>& product, std::vector<double>& potential, ChannelField& out) {
    const int h = state.height;
    const int w = state.width;
    SpectralPlan& plan = SpectralPlan::local(h, w);
    const std::size_t spec_n = plan.spectrum_size();

    if (!out.same_shape(state)) {
        out = ChannelField(h, w, state.channels);
    } else {
        std::fill(out.values.begin(), out.values.end(), 0.0);
    }
    source_spectra.resize(state.channels);
    std::vector<bool> transformed(state.channels, false);
    product.resize(spec_n);
    potential.resize(state.plane_size());

    const auto& specs = rule.rule().kernels;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto& field = rule.kernels()[k];
        const KernelSpec& spec = specs[k];
        if (!field || spec.h == 0.0) {
            continue;
        }
        auto& src_spec = source_spectra[spec.src];
        if (!transformed[spec.src]) {
            src_spec.resize(spec_n);
            plan.forward(state.plane(spec.src), src_spec);
            transformed[spec.src] = true;
        }
        const auto ks = field->spectrum();
        multiply_spectra(src_spec, ks, product);
        plan.inverse(product, potential);
        auto dst = out.plane(spec.dst);
        const double inv_sigma = 1.0 / spec.sigma;
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const double z = (potential[i] - spec.mu) * inv_sigma;
            const double z2 = z * z;
            // Past z^2 = 80 the bell is below half an ulp of 1, so G is exactly -1.
            const double g = z2 > 80.0 ? -1.0 : 2.0 * std::exp(-0.5 * z2) - 1.0;
            dst[i] += spec.h * g;
        }
    }
}

void flow_into(const ChannelField& U, const WorldState& state, const DynamicsParams& p, Displacement& out) {
    if (!U.same_shape(state)) {
        throw DimensionMismatch("affinity and state shapes differ");
    }
    const int h = state.height;
    const int w = state.width;
    if (!out.dx.same_shape(state)) {
        out.dx = Planes(h, w, state.channels);
        out.dy = Planes(h, w, state.channels);
    }

    std::vector<double> total(state.plane_size(), 0.0);
    for (int c = 0; c < state.channels; ++c) {
        const auto a = state.plane(c);
        for (std::size_t i = 0; i < total.size(); ++i) {
            total[i] += a[i];
        }
    }
    std::vector<double> alpha(total.size());
    for (std::size_t i = 0; i < total.size(); ++i) {
        const double ratio = total[i] / p.theta_A;
        const double a = p.n_alpha == 2.0 ? ratio * ratio : std::pow(ratio, p.n_alpha);
        alpha[i] = std::clamp(a, 0.0, 1.0);
    }

    auto idx = [w](int y, int x) { return static_cast<std::size_t>(y) * w + x; };
    for (int c = 0; c < state.channels; ++c) {
        const auto u = U.plane(c);
        auto dx = out.dx.plane(c);
        auto dy = out.dy.plane(c);
        for (int y = 0; y < h; ++y) {
            const int yp = y + 1 == h ? 0 : y + 1;
            const int ym = y == 0 ? h - 1 : y - 1;
            for (int x = 0; x < w; ++x) {
                const int xp = x + 1 == w ? 0 : x + 1;
                const int xm = x == 0 ? w - 1 : x - 1;
                const std::size_t i = idx(y, x);
                const double gux = 0.5 * (u[idx(y, xp)] - u[idx(y, xm)]);
                const double guy = 0.5 * (u[idx(yp, x)] - u[idx(ym, x)]);
                const double gax = 0.5 * (total[idx(y, xp)] - total[idx(y, xm)]);
                const double gay = 0.5 * (total[idx(yp, x)] - total[idx(ym, x)]);
                const double fx = (1.0 - alpha[i]) * gux - alpha[i] * gax;
                const double fy = (1.0 - alpha[i]) * guy - alpha[i] * gay;
                dx[i] = std::clamp(p.dt * fx, -p.d_max, p.d_max);
                dy[i] = std::clamp(p.dt * fy, -p.d_max, p.d_max);
            }
        }
    }
}

struct Footprint {
    int first;      // offset of the first overlapped cell
    double near;    // overlap with cell `first`
    double far;     // overlap with cell `first + 1`
};

// Overlap of [lo, lo + 2*ell] with unit cells, relative to the source cell.
inline Footprint footprint(double d, double ell) {
    const double lo = 0.5 + d - ell;
    const double hi = lo + 2.0 * ell;
    const double first = std::floor(lo);
    const double boundary = first + 1.0;
    return {static_cast<int>(first), std::min(boundary, hi) - lo, std::max(hi - boundary, 0.0)};
}

void advect_into(const WorldState& state, const Displacement& D, double ell, double d_max, WorldState& out) {
    if (!D.dx.same_shape(state) || !D.dy.same_shape(state)) {
        throw DimensionMismatch("displacement and state shapes differ");
    }
    if (!(ell > 0.0 && ell <= 0.5)) {
        throw InvalidArgument("ell must lie in (0, 0.5]");
    }
    const int h = state.height;
    const int w = state.width;
    if (!out.same_shape(state)) {
        out = WorldState(h, w, state.channels);
    } else {
        std::fill(out.values.begin(), out.values.end(), 0.0);
    }
    const double inv_area = 1.0 / (4.0 * ell * ell);
    for (int c = 0; c < state.channels; ++c) {
        const auto a = state.plane(c);
        const auto dxs = D.dx.plane(c);
        const auto dys = D.dy.plane(c);
        auto target = out.plane(c);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double dx = dxs[i];
                const double dy = dys[i];
                if (!(std::abs(dx) <= d_max && std::abs(dy) <= d_max)) {
                    throw DisplacementTooLarge("displacement (" + std::to_string(dx) + ", " + std::to_string(dy) +
                                               ") exceeds d_max at cell (" + std::to_string(y) + ", " +
                                               std::to_string(x) + ")");
                }
                const double m = a[i];
                if (m == 0.0) {
                    continue;
                }
                const Footprint fx = footprint(dx, ell);
                const Footprint fy = footprint(dy, ell);
                const int x0 = ((x + fx.first) % w + w) % w;
                const int x1 = x0 + 1 == w ? 0 : x0 + 1;
                const int y0 = ((y + fy.first) % h + h) % h;
                const int y1 = y0 + 1 == h ? 0 : y0 + 1;
                const double share = m * inv_area;
                const std::size_t r0 = static_cast<std::size_t>(y0) * w;
                const std::size_t r1 = static_cast<std::size_t>(y1) * w;
                target[r0 + x0] += share * (fy.near * fx.near);
                if (fx.far > 0.0) {
                    target[r0 + x1] += share * (fy.near * fx.far);
                }
                if (fy.far > 0.0) {
                    target[r1 + x0] += share * (fy.far * fx.near);
                    if (fx.far > 0.0) {
                        target[r1 + x1] += share * (fy.far * fx.far);
                    }
                }
            }
        }
    }
}

}  // namespace

ChannelField affinity(const WorldState& state, const CompiledRule& rule) {
    check_state_shape(state, rule);
    std::vector<std::vector<std::complex<double>>> spectra;
    std::vector<std::complex<double>> product;
    std::vector<double> potential;
    ChannelField out;
    affinity_into(state, rule, spectra, product, potential, out);
    return out;
}

Displacement flow_field(const ChannelField& U, const WorldState& state, const DynamicsParams& params) {
    Displacement out;
    flow_into(U, state, params, out);
    return out;
}

WorldState advect(const WorldState& state, const Displacement& D, double ell, double d_max) {
    WorldState out;
    advect_into(state, D, ell, d_max, out);
    return out;
}

WorldState step(const WorldState& state, const CompiledRule& rule) {
    WorldState next = state;
    Simulator(rule).step(next);
    return next;
}

WorldState step(const WorldState& state, const UpdateRule& rule) {
    const CompiledRule compiled(rule, state.height, state.width, state.channels);
    return step(state, compiled);
}

WorldState run(const CompiledRule& rule, WorldState init, int steps) {
    if (steps < 0) {
        throw InvalidArgument("step count must be non-negative");
    }
    Simulator(rule).run(init, steps);
    return init;
}

WorldState init_state(std::uint64_t seed, int height, int width, int channels, int patch_side) {
    if (patch_side < 0 || patch_side > height || patch_side > width) {
        throw InvalidArgument("patch side must lie in [0, min(H, W)]");
    }
    WorldState state(height, width, channels);
    Rng rng(seed);
    const int y0 = (height - patch_side) / 2;
    const int x0 = (width - patch_side) / 2;
    for (int c = 0; c < channels; ++c) {
        for (int y = 0; y < patch_side; ++y) {
            for (int x = 0; x < patch_side; ++x) {
                state.at(y0 + y, x0 + x, c) = rng.uniform();
            }
        }
    }
    return state;
}

Simulator::Simulator(const CompiledRule& rule) : rule_(rule) {}

void Simulator::step(WorldState& state) {
    check_state_shape(state, rule_);
    affinity_into(state, rule_, source_spectra_, product_, potential_, affinity_);

    const DynamicsParams& p = rule_.rule().dynamics;
    flow_into(affinity_, state, p, displacement_);
    advect_into(state, displacement_, p.ell, p.d_max, next_);
    std::swap(state, next_);
}

void Simulator::run(WorldState& state, int steps) {
    for (int i = 0; i < steps; ++i) {
        step(state);
    }
}

}  // namespace flf
