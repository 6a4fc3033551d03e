#pragma once

#include "flf/complexity.hpp"
#include "flf/genome.hpp"
#include "flf/rng.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flf {

struct WorldConfig {
    int height = 256;
    int width = 256;
    int channels = kDefaultChannels;
    int patch = 64;
    bool operator==(const WorldConfig&) const = default;
};

struct EvolutionConfig {
    int population_size = 50;
    int generations = 50;
    double mutation_rate = 0.05;
    double crossover_gene_prob = 0.5;
    int elite_count = 1;
    double target = 0.5;  // T
    int scales = kDefaultScales;  // S
    int rollout_steps = 2000;
    WorldConfig world;
    std::uint64_t seed = 0;
    GeneBounds bounds;
    DynamicsParams dynamics;
    bool polar = true;
    EncoderSettings encoder;
    /// When set, elites are re-simulated from a fresh initial state every
    /// generation instead of keeping their cached evaluation.
    bool reevaluate_elites = false;

    /// Throws InvalidArgument on any inconsistent field.
    void validate() const;
};

Genome sample_genome(const SearchSpace& space, Rng& rng);

/// Linear ranking for minimization: ascending fitness (ties by index) gets
/// rank 0..N-1 and probability (N - rank) / (N(N+1)/2).
std::vector<double> rank_probabilities(std::span<const double> fitnesses);
std::size_t rank_select(std::span<const double> fitnesses, Rng& rng);

/// Each gene from `a` with probability gene_prob, otherwise from `b`.
Genome uniform_crossover(const Genome& a, const Genome& b, double gene_prob, Rng& rng);

/// Each gene, with probability `rate`, resampled uniformly within its bounds.
Genome point_mutate(const Genome& g, double rate, const SearchSpace& space, Rng& rng);

struct Evaluation {
    double fitness = 0.0;
    ComplexityProfile profile;
    std::uint64_t init_seed = 0;
};

/// Seed of the initial state for the individual evaluated at (generation, slot).
std::uint64_t individual_seed(std::uint64_t run_seed, int generation, int slot);

/// Final rollout state for a genome started from `init_seed`.
WorldState rollout(const Genome& genome, const Wiring& wiring, const EvolutionConfig& config,
                   std::uint64_t init_seed);

Evaluation evaluate(const Genome& genome, const Wiring& wiring, const EvolutionConfig& config, int generation,
                    int slot);

struct Individual {
    Genome genome;
    std::string id;  // "g<generation>s<slot>" of the evaluation that produced it
    Evaluation eval;
};

struct Offspring {
    Genome genome;
    std::optional<std::size_t> elite_of;  // parent slot when copied unchanged
};

/// Elites first (copied unchanged), then children from rank-selected distinct
/// parents, uniform crossover and point mutation, drawn slot by slot.
std::vector<Offspring> next_generation(std::span<const Genome> population, std::span<const double> fitnesses,
                                       const EvolutionConfig& config, const SearchSpace& space, Rng& rng);

struct GenerationStats {
    int generation = 0;
    double best_fit = 0.0;
    double mean_fit = 0.0;
    double min_fit = 0.0;
    double max_fit = 0.0;
    double best_c0 = 0.0;
    double mean_c0 = 0.0;
    double min_c0 = 0.0;
    double max_c0 = 0.0;
    std::string best_id;
};

/// Index of the fittest individual (lowest fitness, lowest index on ties).
std::size_t best_index(std::span<const Individual> population);
GenerationStats summarize(int generation, std::span<const Individual> population);

inline constexpr const char* kStatsHeader =
    "gen,best_fit,mean_fit,min_fit,max_fit,best_c0,mean_c0,min_c0,max_c0,best_id";

void write_stats_header(std::ostream& out);
void write_stats_row(std::ostream& out, const GenerationStats& stats);
std::vector<GenerationStats> read_stats_csv(std::istream& in);

struct EvolutionResult {
    Wiring wiring;
    std::vector<GenerationStats> history;
    std::vector<Individual> initial;
    std::vector<Individual> final;
};

using GenerationObserver =
    std::function<void(int generation, std::span<const Individual> population, const GenerationStats& stats)>;

/// Runs the generational loop. history[0] is the evaluated initial
/// population; one more row follows per generation. Evaluations within a
/// generation run on up to `workers` threads; all random draws happen on the
/// calling thread, so results do not depend on the worker count.
EvolutionResult evolve(const EvolutionConfig& config, unsigned workers = 1, const GenerationObserver& observer = {});

/// Wiring and initial population drawn from the run seed, in that order.
Wiring experiment_wiring(const EvolutionConfig& config, Rng& rng);

}  // namespace flf
