#pragma once

#include "flf/dynamics.hpp"
#include "flf/rng.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flf {

inline constexpr int kSearchSpaceVersion = 1;

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(const Interval&) const = default;
};

/// Bounds per evolvable parameter type; each kernel-level type applies to all
/// kernels (and all rings, for a, b, w).
struct GeneBounds {
    Interval R{2.0, 25.0};
    Interval r{0.2, 1.0};
    Interval h{0.0, 1.0};
    Interval mu{0.05, 0.5};
    Interval sigma{0.001, 0.18};
    Interval a{0.0, 1.0};
    Interval b{0.0, 1.0};
    Interval w{0.01, 0.5};
    bool operator==(const GeneBounds&) const = default;
};

struct Gene {
    std::string name;
    double lo;
    double hi;
};

/// Flat layout: R, then {r, h, mu, sigma} per kernel, then
/// {a0, a1, a2, b0, b1, b2, w0, w1, w2} per kernel. 157 genes for 12 kernels.
class SearchSpace {
public:
    explicit SearchSpace(const GeneBounds& bounds = {}, int kernel_count = kKernelCount);

    [[nodiscard]] std::size_t size() const { return genes_.size(); }
    [[nodiscard]] const std::vector<Gene>& genes() const { return genes_; }
    [[nodiscard]] const Gene& gene(std::size_t i) const { return genes_[i]; }
    [[nodiscard]] int kernel_count() const { return kernel_count_; }
    [[nodiscard]] const GeneBounds& bounds() const { return bounds_; }
    [[nodiscard]] std::vector<std::string> names() const;

    /// Throws InvalidSpace unless lo < hi for every gene.
    void validate() const;

    // Gene indices.
    static constexpr std::size_t radius_index() { return 0; }
    [[nodiscard]] std::size_t kernel_index(int k, int field) const { return 1 + 4 * k + field; }
    [[nodiscard]] std::size_t ring_index(int k, int param, int ring) const {
        return 1 + 4 * static_cast<std::size_t>(kernel_count_) + 9 * k + 3 * param + ring;
    }

private:
    GeneBounds bounds_;
    int kernel_count_;
    std::vector<Gene> genes_;
};

struct Genome {
    std::vector<double> genes;
    bool operator==(const Genome&) const = default;
};

/// (src, dst) channel per kernel; fixed for an experiment, never evolved.
using Wiring = std::vector<std::pair<int, int>>;

/// Uniform over all channel pairs, one draw per kernel.
Wiring sample_wiring(int kernel_count, int channels, Rng& rng);

/// True when every gene lies in its bounds.
bool within_bounds(const Genome& genome, const SearchSpace& space);

UpdateRule decode_rule(const Genome& genome, const SearchSpace& space, const Wiring& wiring,
                       const DynamicsParams& dynamics = {});

}  // namespace flf
