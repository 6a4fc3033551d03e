#include "flf/genome.hpp"

#include "flf/errors.hpp"

#include <algorithm>

namespace flf {

SearchSpace::SearchSpace(const GeneBounds& bounds, int kernel_count) : bounds_(bounds), kernel_count_(kernel_count) {
    if (kernel_count <= 0) {
        throw InvalidSpace("search space needs at least one kernel");
    }
    genes_.reserve(1 + 13 * static_cast<std::size_t>(kernel_count));
    genes_.push_back({"R", bounds.R.lo, bounds.R.hi});
    const std::pair<const char*, Interval> kernel_fields[] = {
        {"r", bounds.r}, {"h", bounds.h}, {"mu", bounds.mu}, {"sigma", bounds.sigma}};
    for (int k = 0; k < kernel_count; ++k) {
        for (const auto& [name, iv] : kernel_fields) {
            genes_.push_back({"k" + std::to_string(k) + "." + name, iv.lo, iv.hi});
        }
    }
    const std::pair<const char*, Interval> ring_fields[] = {{"a", bounds.a}, {"b", bounds.b}, {"w", bounds.w}};
    for (int k = 0; k < kernel_count; ++k) {
        for (const auto& [name, iv] : ring_fields) {
            for (int ring = 0; ring < 3; ++ring) {
                genes_.push_back({"k" + std::to_string(k) + "." + name + std::to_string(ring), iv.lo, iv.hi});
            }
        }
    }
}

std::vector<std::string> SearchSpace::names() const {
    std::vector<std::string> out;
    out.reserve(genes_.size());
    for (const Gene& g : genes_) {
        out.push_back(g.name);
    }
    return out;
}

void SearchSpace::validate() const {
    for (const Gene& g : genes_) {
        if (!(g.lo < g.hi)) {
            throw InvalidSpace("gene " + g.name + " has empty range [" + std::to_string(g.lo) + ", " +
                               std::to_string(g.hi) + "]");
        }
    }
}

Wiring sample_wiring(int kernel_count, int channels, Rng& rng) {
    Wiring wiring;
    wiring.reserve(kernel_count);
    const auto pairs = static_cast<std::uint64_t>(channels) * channels;
    for (int k = 0; k < kernel_count; ++k) {
        const auto p = static_cast<int>(rng.below(pairs));
        wiring.emplace_back(p / channels, p % channels);
    }
    return wiring;
}

bool within_bounds(const Genome& genome, const SearchSpace& space) {
    if (genome.genes.size() != space.size()) {
        return false;
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
        const double v = genome.genes[i];
        if (!(v >= space.gene(i).lo && v <= space.gene(i).hi)) {
            return false;
        }
    }
    return true;
}

UpdateRule decode_rule(const Genome& genome, const SearchSpace& space, const Wiring& wiring,
                       const DynamicsParams& dynamics) {
    if (genome.genes.size() != space.size()) {
        throw InvalidArgument("genome has " + std::to_string(genome.genes.size()) + " genes, space expects " +
                              std::to_string(space.size()));
    }
    if (wiring.size() != static_cast<std::size_t>(space.kernel_count())) {
        throw InvalidArgument("wiring table does not match the kernel count");
    }
    const auto& g = genome.genes;
    UpdateRule rule;
    rule.R = g[SearchSpace::radius_index()];
    rule.dynamics = dynamics;
    rule.kernels.resize(space.kernel_count());
    for (int k = 0; k < space.kernel_count(); ++k) {
        KernelSpec& spec = rule.kernels[k];
        spec.r = g[space.kernel_index(k, 0)];
        spec.h = g[space.kernel_index(k, 1)];
        spec.mu = g[space.kernel_index(k, 2)];
        spec.sigma = g[space.kernel_index(k, 3)];
        for (int ring = 0; ring < 3; ++ring) {
            spec.rings[ring] = {g[space.ring_index(k, 0, ring)], g[space.ring_index(k, 1, ring)],
                                g[space.ring_index(k, 2, ring)]};
        }
        spec.src = wiring[k].first;
        spec.dst = wiring[k].second;
    }
    return rule;
}

}  // namespace flf
