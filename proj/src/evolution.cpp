#include "flf/evolution.hpp"

#include "flf/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

namespace flf {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw InvalidArgument(message);
    }
}

void require_within(const Interval& iv, double lo, double hi, const char* name) {
    require(iv.lo < iv.hi, std::string("bounds for ") + name + " must satisfy lo < hi");
    require(iv.lo >= lo && iv.hi <= hi,
            std::string("bounds for ") + name + " must stay inside [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
}

}  // namespace

void EvolutionConfig::validate() const {
    require(population_size >= 2, "population_size must be at least 2");
    require(generations >= 0, "generations must be non-negative");
    require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "mutation_rate must lie in [0, 1]");
    require(crossover_gene_prob >= 0.0 && crossover_gene_prob <= 1.0, "crossover_gene_prob must lie in [0, 1]");
    require(elite_count >= 0 && elite_count < population_size, "elite_count must lie in [0, population_size)");
    require(target >= 0.0 && target <= 1.0, "target must lie in [0, 1]");
    require(scales >= 0 && scales < 16, "scales must lie in [0, 15]");
    require(rollout_steps >= 0, "rollout_steps must be non-negative");
    require(world.height > 0 && world.width > 0, "world dimensions must be positive");
    require(world.channels == 3, "the complexity measure renders exactly 3 channels");
    require(world.patch >= 0 && world.patch <= std::min(world.height, world.width),
            "patch must lie in [0, min(height, width)]");
    const int f = 1 << scales;
    require(world.height % f == 0 && world.width % f == 0, "2^scales must divide the world dimensions");

    require_within(bounds.R, 2.0, 25.0, "R");
    require_within(bounds.r, 1e-9, 1.0, "r");
    require_within(bounds.h, 0.0, 1.0, "h");
    require_within(bounds.mu, 0.05, 0.5, "mu");
    require_within(bounds.sigma, 0.001, 0.18, "sigma");
    require_within(bounds.a, 0.0, 1.0, "a");
    require_within(bounds.b, 0.0, 1.0, "b");
    require_within(bounds.w, 0.01, 0.5, "w");
    const int widest = 2 * static_cast<int>(std::ceil(std::max(bounds.R.hi * bounds.r.hi, 1.0))) + 1;
    require(widest <= std::min(world.height, world.width),
            "largest kernel support (" + std::to_string(widest) + " cells) exceeds the world");

    UpdateRule probe;
    probe.dynamics = dynamics;
    probe.kernels.resize(1);
    probe.validate(world.height, world.width, world.channels);
}

Genome sample_genome(const SearchSpace& space, Rng& rng) {
    space.validate();
    Genome g;
    g.genes.reserve(space.size());
    for (const Gene& gene : space.genes()) {
        g.genes.push_back(rng.uniform(gene.lo, gene.hi));
    }
    return g;
}

namespace {

std::vector<std::size_t> rank_order(std::span<const double> fitnesses) {
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // NaN sorts last.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const double a = fitnesses[i];
        const double b = fitnesses[j];
        if (std::isnan(a) || std::isnan(b)) {
            return !std::isnan(a) && std::isnan(b);
        }
        return a < b;
    });
    return order;
}

}  // namespace

std::vector<double> rank_probabilities(std::span<const double> fitnesses) {
    if (fitnesses.empty()) {
        throw EmptyPopulation("rank selection over an empty population");
    }
    const auto n = fitnesses.size();
    const double total = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
    const auto order = rank_order(fitnesses);
    std::vector<double> p(n);
    for (std::size_t rank = 0; rank < n; ++rank) {
        p[order[rank]] = static_cast<double>(n - rank) / total;
    }
    return p;
}

std::size_t rank_select(std::span<const double> fitnesses, Rng& rng) {
    if (fitnesses.empty()) {
        throw EmptyPopulation("rank selection over an empty population");
    }
    const auto n = static_cast<std::uint64_t>(fitnesses.size());
    const auto order = rank_order(fitnesses);
    // Integer weights n - rank avoid any floating-point drift in the walk.
    std::uint64_t ticket = rng.below(n * (n + 1) / 2);
    for (std::uint64_t rank = 0; rank < n; ++rank) {
        const std::uint64_t weight = n - rank;
        if (ticket < weight) {
            return order[rank];
        }
        ticket -= weight;
    }
    return order.back();
}

Genome uniform_crossover(const Genome& a, const Genome& b, double gene_prob, Rng& rng) {
    if (a.genes.size() != b.genes.size()) {
        throw InvalidArgument("crossover parents differ in length");
    }
    Genome child;
    child.genes.resize(a.genes.size());
    for (std::size_t i = 0; i < a.genes.size(); ++i) {
        child.genes[i] = rng.bernoulli(gene_prob) ? a.genes[i] : b.genes[i];
    }
    return child;
}

Genome point_mutate(const Genome& g, double rate, const SearchSpace& space, Rng& rng) {
    if (g.genes.size() != space.size()) {
        throw InvalidArgument("genome length differs from the search space");
    }
    Genome out = g;
    for (std::size_t i = 0; i < out.genes.size(); ++i) {
        if (rng.bernoulli(rate)) {
            out.genes[i] = rng.uniform(space.gene(i).lo, space.gene(i).hi);
        }
    }
    return out;
}

std::uint64_t individual_seed(std::uint64_t run_seed, int generation, int slot) {
    return derive_seed({run_seed, 0x1217ULL, static_cast<std::uint64_t>(generation), static_cast<std::uint64_t>(slot)});
}

WorldState rollout(const Genome& genome, const Wiring& wiring, const EvolutionConfig& config,
                   std::uint64_t init_seed) {
    const SearchSpace space(config.bounds);
    const WorldConfig& w = config.world;
    const CompiledRule rule(decode_rule(genome, space, wiring, config.dynamics), w.height, w.width, w.channels);
    WorldState state = init_state(init_seed, w.height, w.width, w.channels, w.patch);
    Simulator(rule).run(state, config.rollout_steps);
    return state;
}

Evaluation evaluate(const Genome& genome, const Wiring& wiring, const EvolutionConfig& config, int generation,
                    int slot) {
    Evaluation e;
    e.init_seed = individual_seed(config.seed, generation, slot);
    const WorldState final_state = rollout(genome, wiring, config, e.init_seed);
    e.profile = complexity_profile(final_state, config.scales, config.polar, config.encoder);
    e.fitness = fitness(e.profile, config.target);
    return e;
}

std::vector<Offspring> next_generation(std::span<const Genome> population, std::span<const double> fitnesses,
                                       const EvolutionConfig& config, const SearchSpace& space, Rng& rng) {
    if (population.empty()) {
        throw EmptyPopulation("next_generation of an empty population");
    }
    if (population.size() != fitnesses.size()) {
        throw InvalidArgument("population and fitness vectors differ in length");
    }
    const std::size_t n = population.size();
    const auto elites = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.elite_count, 0)), n);
    const auto order = rank_order(fitnesses);

    std::vector<Offspring> next;
    next.reserve(n);
    for (std::size_t e = 0; e < elites; ++e) {
        next.push_back({population[order[e]], order[e]});
    }
    while (next.size() < n) {
        const std::size_t first = rank_select(fitnesses, rng);
        std::size_t second = rank_select(fitnesses, rng);
        while (n > 1 && second == first) {
            second = rank_select(fitnesses, rng);
        }
        Genome child = uniform_crossover(population[first], population[second], config.crossover_gene_prob, rng);
        child = point_mutate(child, config.mutation_rate, space, rng);
        next.push_back({std::move(child), std::nullopt});
    }
    return next;
}

std::size_t best_index(std::span<const Individual> population) {
    if (population.empty()) {
        throw EmptyPopulation("best of an empty population");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (population[i].eval.fitness < population[best].eval.fitness) {
            best = i;
        }
    }
    return best;
}

GenerationStats summarize(int generation, std::span<const Individual> population) {
    const std::size_t best = best_index(population);
    GenerationStats s;
    s.generation = generation;
    s.best_fit = population[best].eval.fitness;
    s.best_c0 = population[best].eval.profile.values.at(0);
    s.best_id = population[best].id;
    s.min_fit = s.max_fit = s.best_fit;
    s.min_c0 = s.max_c0 = s.best_c0;
    double fit_sum = 0.0;
    double c0_sum = 0.0;
    for (const Individual& ind : population) {
        const double f = ind.eval.fitness;
        const double c0 = ind.eval.profile.values.at(0);
        fit_sum += f;
        c0_sum += c0;
        s.min_fit = std::min(s.min_fit, f);
        s.max_fit = std::max(s.max_fit, f);
        s.min_c0 = std::min(s.min_c0, c0);
        s.max_c0 = std::max(s.max_c0, c0);
    }
    const auto n = static_cast<double>(population.size());
    // Rounding in the sum can push a mean of equal values a hair outside.
    s.mean_fit = std::clamp(fit_sum / n, s.min_fit, s.max_fit);
    s.mean_c0 = std::clamp(c0_sum / n, s.min_c0, s.max_c0);
    return s;
}

void write_stats_header(std::ostream& out) { out << kStatsHeader << '\n'; }

void write_stats_row(std::ostream& out, const GenerationStats& s) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%.9f,%s\n", s.generation, s.best_fit,
                  s.mean_fit, s.min_fit, s.max_fit, s.best_c0, s.mean_c0, s.min_c0, s.max_c0, s.best_id.c_str());
    out << buf;
}

std::vector<GenerationStats> read_stats_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kStatsHeader) {
        throw MissingStats("stats CSV is missing its header");
    }
    std::vector<GenerationStats> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 10) {
            throw MissingStats("malformed stats row: " + line);
        }
        GenerationStats s;
        try {
            s.generation = std::stoi(cells[0]);
            double* fields[] = {&s.best_fit, &s.mean_fit, &s.min_fit, &s.max_fit,
                                &s.best_c0,  &s.mean_c0,  &s.min_c0,  &s.max_c0};
            for (std::size_t i = 0; i < 8; ++i) {
                *fields[i] = std::stod(cells[i + 1]);
            }
        } catch (const std::logic_error&) {
            throw MissingStats("non-numeric stats row: " + line);
        }
        s.best_id = cells[9];
        rows.push_back(std::move(s));
    }
    return rows;
}

namespace {

// Runs fn(i) for i in [0, n) on up to `workers` threads; the first exception
// in index order is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    auto body = [&](std::atomic<std::size_t>& next) {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::atomic<std::size_t> next{0};
    const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (threads == 1) {
        body(next);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&] { body(next); });
        }
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

std::string individual_id(int generation, std::size_t slot) { return "g" + std::to_string(generation) + "s" + std::to_string(slot); }

}  // namespace

Wiring experiment_wiring(const EvolutionConfig& config, Rng& rng) {
    return sample_wiring(kKernelCount, config.world.channels, rng);
}

EvolutionResult evolve(const EvolutionConfig& config, unsigned workers, const GenerationObserver& observer) {
    config.validate();
    const SearchSpace space(config.bounds);
    space.validate();
    Rng rng(config.seed);

    EvolutionResult result;
    result.wiring = experiment_wiring(config, rng);
    const auto n = static_cast<std::size_t>(config.population_size);

    std::vector<Individual> population(n);
    for (std::size_t i = 0; i < n; ++i) {
        population[i].genome = sample_genome(space, rng);
        population[i].id = individual_id(0, i);
    }
    parallel_for(n, workers, [&](std::size_t i) {
        population[i].eval = evaluate(population[i].genome, result.wiring, config, 0, static_cast<int>(i));
    });
    result.history.push_back(summarize(0, population));
    result.initial = population;
    if (observer) {
        observer(0, population, result.history.back());
    }

    std::vector<Genome> genomes(n);
    std::vector<double> fitnesses(n);
    for (int gen = 1; gen <= config.generations; ++gen) {
        for (std::size_t i = 0; i < n; ++i) {
            genomes[i] = population[i].genome;
            fitnesses[i] = population[i].eval.fitness;
        }
        auto offspring = next_generation(genomes, fitnesses, config, space, rng);

        std::vector<Individual> next(n);
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < n; ++i) {
            if (offspring[i].elite_of && !config.reevaluate_elites) {
                next[i] = population[*offspring[i].elite_of];
            } else {
                next[i].genome = std::move(offspring[i].genome);
                next[i].id = individual_id(gen, i);
                pending.push_back(i);
            }
        }
        parallel_for(pending.size(), workers, [&](std::size_t k) {
            const std::size_t i = pending[k];
            next[i].eval = evaluate(next[i].genome, result.wiring, config, gen, static_cast<int>(i));
        });
        population = std::move(next);
        result.history.push_back(summarize(gen, population));
        if (observer) {
            observer(gen, population, result.history.back());
        }
    }
    result.final = std::move(population);
    return result;
}

}  // namespace flf
