#include "flf/errors.hpp"
#include "flf/evolution.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace flf;

namespace {

EvolutionConfig tiny_config() {
    EvolutionConfig c;
    c.population_size = 4;
    c.generations = 2;
    c.rollout_steps = 10;
    c.scales = 2;
    c.world = {32, 32, 3, 16};
    c.bounds.R = {2.0, 8.0};
    c.seed = 3;
    return c;
}

Genome constant_genome(const SearchSpace& space, double frac) {
    Genome g;
    for (const Gene& gene : space.genes()) {
        g.genes.push_back(gene.lo + frac * (gene.hi - gene.lo));
    }
    return g;
}

}  // namespace

TEST_SUITE("genome") {
    TEST_CASE("default layout") {
        const SearchSpace space;
        CHECK(space.size() == 157);
        CHECK(space.gene(0).name == "R");
        CHECK(space.gene(0).lo == 2.0);
        CHECK(space.gene(0).hi == 25.0);
        CHECK(space.gene(space.kernel_index(0, 0)).name == "k0.r");
        CHECK(space.gene(space.kernel_index(11, 3)).name == "k11.sigma");
        CHECK(space.kernel_index(11, 3) == 48);
        CHECK(space.gene(space.ring_index(0, 0, 0)).name == "k0.a0");
        CHECK(space.gene(space.ring_index(3, 1, 2)).name == "k3.b2");
        CHECK(space.gene(space.ring_index(11, 2, 2)).name == "k11.w2");
        CHECK(space.ring_index(11, 2, 2) == 156);
        const auto names = space.names();
        CHECK(std::set<std::string>(names.begin(), names.end()).size() == 157);
        CHECK(SearchSpace(GeneBounds{}, 2).size() == 1 + 2 * 13);
    }

    TEST_CASE("bounds per parameter type") {
        const SearchSpace space;
        for (int k = 0; k < kKernelCount; ++k) {
            CHECK(space.gene(space.kernel_index(k, 2)).lo == 0.05);
            CHECK(space.gene(space.kernel_index(k, 2)).hi == 0.5);
            CHECK(space.gene(space.ring_index(k, 2, 1)).lo == 0.01);
        }
    }

    TEST_CASE("empty intervals are rejected") {
        GeneBounds b;
        b.mu = {0.2, 0.2};
        const SearchSpace space(b);
        CHECK_THROWS_AS(space.validate(), InvalidSpace);
        Rng rng(1);
        CHECK_THROWS_AS(sample_genome(space, rng), InvalidSpace);
    }

    TEST_CASE("sampling is seeded and in bounds") {
        const SearchSpace space;
        Rng a(5);
        Rng b(5);
        CHECK(sample_genome(space, a) == sample_genome(space, b));
        Rng rng(6);
        double mu_sum = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const Genome g = sample_genome(space, rng);
            CHECK(within_bounds(g, space));
            mu_sum += g.genes[space.kernel_index(i % kKernelCount, 2)];
        }
        CHECK(std::abs(mu_sum / 10000 - 0.275) <= 0.01);
    }

    TEST_CASE("decoding") {
        const SearchSpace space;
        Rng rng(7);
        const Genome g = sample_genome(space, rng);
        const Wiring wiring = sample_wiring(kKernelCount, 3, rng);
        const UpdateRule rule = decode_rule(g, space, wiring);
        CHECK(rule.R == g.genes[0]);
        REQUIRE(rule.kernels.size() == 12);
        const KernelSpec& k5 = rule.kernels[5];
        CHECK(k5.r == g.genes[space.kernel_index(5, 0)]);
        CHECK(k5.h == g.genes[space.kernel_index(5, 1)]);
        CHECK(k5.mu == g.genes[space.kernel_index(5, 2)]);
        CHECK(k5.sigma == g.genes[space.kernel_index(5, 3)]);
        CHECK(k5.rings[1].center == g.genes[space.ring_index(5, 0, 1)]);
        CHECK(k5.rings[2].height == g.genes[space.ring_index(5, 1, 2)]);
        CHECK(k5.rings[0].width == g.genes[space.ring_index(5, 2, 0)]);
        CHECK(k5.src == wiring[5].first);
        CHECK(k5.dst == wiring[5].second);
        CHECK_NOTHROW(rule.validate(256, 256, 3));

        Genome bad = g;
        bad.genes.pop_back();
        CHECK_THROWS_AS(decode_rule(bad, space, wiring), InvalidArgument);
        CHECK_THROWS_AS(decode_rule(g, space, Wiring(3)), InvalidArgument);
        bad = g;
        bad.genes[0] = 30.0;
        CHECK_FALSE(within_bounds(bad, space));
    }

    TEST_CASE("wiring covers every channel pair") {
        Rng rng(8);
        std::set<std::pair<int, int>> seen;
        for (int i = 0; i < 50; ++i) {
            for (const auto& p : sample_wiring(kKernelCount, 3, rng)) {
                CHECK((p.first >= 0 && p.first < 3 && p.second >= 0 && p.second < 3));
                seen.insert(p);
            }
        }
        CHECK(seen.size() == 9);
    }
}

TEST_SUITE("operators") {
    TEST_CASE("rank probabilities") {
        const std::vector<double> two{0.1, 0.5};
        const auto p2 = rank_probabilities(two);
        CHECK(p2[0] == doctest::Approx(2.0 / 3.0));
        CHECK(p2[1] == doctest::Approx(1.0 / 3.0));
        const std::vector<double> three{0.3, 0.1, 0.2};
        const auto p3 = rank_probabilities(three);
        CHECK(p3[0] == doctest::Approx(1.0 / 6.0));
        CHECK(p3[1] == doctest::Approx(3.0 / 6.0));
        CHECK(p3[2] == doctest::Approx(2.0 / 6.0));
        const std::vector<double> nan_last{std::nan(""), 0.4};
        CHECK(rank_probabilities(nan_last)[1] == doctest::Approx(2.0 / 3.0));
        CHECK_THROWS_AS(rank_probabilities(std::vector<double>{}), EmptyPopulation);
    }

    TEST_CASE("selection frequencies follow the rank probabilities") {
        const std::vector<double> f{0.9, 0.1, 0.5, 0.3, 0.7};
        const auto p = rank_probabilities(f);
        std::vector<int> counts(f.size(), 0);
        Rng rng(9);
        const int trials = 100000;
        for (int i = 0; i < trials; ++i) {
            ++counts[rank_select(f, rng)];
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double sd = std::sqrt(p[i] * (1 - p[i]) / trials);
            CHECK(std::abs(counts[i] / double(trials) - p[i]) <= 4 * sd);
        }
    }

    TEST_CASE("equal fitness selects uniformly in expectation over positions") {
        // Ties rank by index, so each draw favors low indices; averaged over
        // random relabelings of the population every slot is equally likely.
        const int n = 4;
        const std::vector<double> f(n, 0.25);
        std::vector<double> expected(n, 0.0);
        std::vector<int> perm{0, 1, 2, 3};
        int perms = 0;
        do {
            const auto p = rank_probabilities(f);
            for (int i = 0; i < n; ++i) {
                expected[perm[i]] += p[i];
            }
            ++perms;
        } while (std::next_permutation(perm.begin(), perm.end()));
        for (double e : expected) {
            CHECK(e / perms == doctest::Approx(1.0 / n));
        }
    }

    TEST_CASE("crossover boundaries and frequency") {
        const SearchSpace space;
        Rng rng(10);
        const Genome a = constant_genome(space, 0.25);
        const Genome b = constant_genome(space, 0.75);
        CHECK(uniform_crossover(a, a, 0.5, rng) == a);
        CHECK(uniform_crossover(a, b, 1.0, rng) == a);
        CHECK(uniform_crossover(a, b, 0.0, rng) == b);
        std::vector<int> from_a(space.size(), 0);
        const int trials = 10000;
        for (int t = 0; t < trials; ++t) {
            const Genome c = uniform_crossover(a, b, 0.5, rng);
            for (std::size_t i = 0; i < space.size(); ++i) {
                from_a[i] += c.genes[i] == a.genes[i];
            }
        }
        for (int count : from_a) {
            CHECK(std::abs(count / double(trials) - 0.5) <= 0.02);
        }
        CHECK_THROWS_AS(uniform_crossover(a, Genome{{1.0}}, 0.5, rng), InvalidArgument);
    }

    TEST_CASE("mutation boundaries and count") {
        const SearchSpace space;
        Rng rng(11);
        const Genome g = constant_genome(space, 0.5);
        CHECK(point_mutate(g, 0.0, space, rng) == g);
        const Genome all = point_mutate(g, 1.0, space, rng);
        CHECK(within_bounds(all, space));
        int unchanged = 0;
        for (std::size_t i = 0; i < space.size(); ++i) {
            unchanged += all.genes[i] == g.genes[i];
        }
        CHECK(unchanged == 0);

        const int trials = 10000;
        long total = 0;
        for (int t = 0; t < trials; ++t) {
            const Genome m = point_mutate(g, 0.05, space, rng);
            CHECK(within_bounds(m, space));
            for (std::size_t i = 0; i < space.size(); ++i) {
                total += m.genes[i] != g.genes[i];
            }
        }
        CHECK(std::abs(total / double(trials) - 7.85) <= 0.3);
    }

    TEST_CASE("operator chains stay in bounds") {
        const SearchSpace space;
        Rng rng(12);
        std::vector<Genome> pop;
        for (int i = 0; i < 6; ++i) {
            pop.push_back(sample_genome(space, rng));
        }
        std::vector<double> fit{0.3, 0.1, 0.5, 0.2, 0.4, 0.6};
        EvolutionConfig config;
        config.population_size = 6;
        config.mutation_rate = 0.3;
        for (int gen = 0; gen < 50; ++gen) {
            const auto next = next_generation(pop, fit, config, space, rng);
            pop.clear();
            for (const Offspring& o : next) {
                CHECK(within_bounds(o.genome, space));
                pop.push_back(o.genome);
            }
            for (double& f : fit) {
                f = rng.uniform();
            }
        }
    }
}

TEST_SUITE("evaluation") {
    TEST_CASE("seeds are distinct per slot and generation") {
        std::set<std::uint64_t> seeds;
        for (int g = 0; g < 20; ++g) {
            for (int s = 0; s < 20; ++s) {
                seeds.insert(individual_seed(1, g, s));
            }
        }
        CHECK(seeds.size() == 400);
        CHECK(individual_seed(1, 2, 3) == individual_seed(1, 2, 3));
        CHECK(individual_seed(1, 2, 3) != individual_seed(2, 2, 3));
    }

    TEST_CASE("repeatable to the bit") {
        const EvolutionConfig config = tiny_config();
        const SearchSpace space(config.bounds);
        Rng rng(13);
        const Genome g = sample_genome(space, rng);
        const Wiring w = sample_wiring(kKernelCount, 3, rng);
        const Evaluation a = evaluate(g, w, config, 4, 2);
        const Evaluation b = evaluate(g, w, config, 4, 2);
        CHECK(a.fitness == b.fitness);
        CHECK(a.profile == b.profile);
        CHECK(a.init_seed == individual_seed(config.seed, 4, 2));
        CHECK(a.profile.values.size() == 3);
        CHECK(a.fitness == fitness(a.profile, config.target));
        CHECK(a.profile == complexity_profile(rollout(g, w, config, a.init_seed), 2));
    }

    TEST_CASE("default profile has five scales") {
        EvolutionConfig config = tiny_config();
        config.scales = kDefaultScales;
        const SearchSpace space(config.bounds);
        Rng rng(14);
        const Evaluation e = evaluate(sample_genome(space, rng), sample_wiring(12, 3, rng), config, 0, 0);
        CHECK(e.profile.values.size() == 5);
    }

    TEST_CASE("genome without affinity only spreads under crowding") {
        EvolutionConfig config = tiny_config();
        const SearchSpace space(config.bounds);
        Rng rng(15);
        Genome g = sample_genome(space, rng);
        for (int k = 0; k < kKernelCount; ++k) {
            g.genes[space.kernel_index(k, 1)] = 0.0;
        }
        const Wiring w = sample_wiring(kKernelCount, 3, rng);
        const WorldState init = init_state(9, 32, 32, 3, 16);
        const WorldState moved = rollout(g, w, config, 9);
        CHECK(moved.total_mass() == doctest::Approx(init.total_mass()).epsilon(1e-12));
        config.dynamics.theta_A = 1e200;
        CHECK(rollout(g, w, config, 9) == init);
    }
}

TEST_SUITE("evolve") {
    TEST_CASE("next generation keeps the elite and the size") {
        EvolutionConfig config = tiny_config();
        config.population_size = 5;
        config.elite_count = 2;
        const SearchSpace space(config.bounds);
        Rng rng(16);
        std::vector<Genome> pop;
        for (int i = 0; i < 5; ++i) {
            pop.push_back(sample_genome(space, rng));
        }
        const std::vector<double> fit{0.4, 0.2, 0.9, 0.1, 0.3};
        const auto next = next_generation(pop, fit, config, space, rng);
        REQUIRE(next.size() == 5);
        CHECK(next[0].elite_of == 3u);
        CHECK(next[0].genome == pop[3]);
        CHECK(next[1].elite_of == 1u);
        CHECK_FALSE(next[2].elite_of.has_value());
        CHECK_THROWS_AS(next_generation(std::vector<Genome>{}, std::vector<double>{}, config, space, rng),
                        EmptyPopulation);
    }

    TEST_CASE("identical population without mutation is a fixed point") {
        EvolutionConfig config = tiny_config();
        config.mutation_rate = 0.0;
        const SearchSpace space(config.bounds);
        Rng rng(17);
        const Genome g = sample_genome(space, rng);
        const std::vector<Genome> pop(4, g);
        const std::vector<double> fit{0.2, 0.2, 0.2, 0.2};
        for (int elites : {1, 4}) {
            config.elite_count = elites;
            for (const Offspring& o : next_generation(pop, fit, config, space, rng)) {
                CHECK(o.genome == g);
            }
        }
    }

    TEST_CASE("zero generations evaluates only the initial population") {
        EvolutionConfig config = tiny_config();
        config.generations = 0;
        int calls = 0;
        const EvolutionResult r = evolve(config, 1, [&](int gen, auto pop, const GenerationStats& s) {
            CHECK(gen == 0);
            CHECK(pop.size() == 4);
            CHECK(s.generation == 0);
            ++calls;
        });
        CHECK(calls == 1);
        CHECK(r.history.size() == 1);
        CHECK(r.initial.size() == 4);
        CHECK(r.final.size() == 4);
        CHECK(r.initial[2].id == "g0s2");
    }

    TEST_CASE("history, elitism and statistics") {
        EvolutionConfig config = tiny_config();
        config.generations = 3;
        const EvolutionResult r = evolve(config);
        REQUIRE(r.history.size() == 4);
        for (std::size_t g = 0; g < r.history.size(); ++g) {
            const GenerationStats& s = r.history[g];
            CHECK(s.generation == static_cast<int>(g));
            CHECK(s.min_fit <= s.mean_fit);
            CHECK(s.mean_fit <= s.max_fit);
            CHECK(s.min_c0 <= s.mean_c0);
            CHECK(s.mean_c0 <= s.max_c0);
            CHECK(s.best_fit == s.min_fit);
            if (g > 0) {
                CHECK(s.best_fit <= r.history[g - 1].best_fit);
            }
        }
        for (const Individual& ind : r.final) {
            CHECK(within_bounds(ind.genome, SearchSpace(config.bounds)));
            CHECK(ind.eval.fitness == fitness(ind.eval.profile, config.target));
        }
        CHECK(r.history.back().best_id == r.final[best_index(r.final)].id);
    }

    TEST_CASE("deterministic and independent of the worker count") {
        EvolutionConfig config = tiny_config();
        auto csv = [&](unsigned workers) {
            std::ostringstream out;
            write_stats_header(out);
            for (const GenerationStats& s : evolve(config, workers).history) {
                write_stats_row(out, s);
            }
            return out.str();
        };
        const std::string one = csv(1);
        CHECK(one == csv(1));
        CHECK(one == csv(3));
        config.seed = 4;
        CHECK(one != csv(1));
    }

    TEST_CASE("elite re-evaluation draws a fresh initial state") {
        EvolutionConfig config = tiny_config();
        config.generations = 1;
        config.reevaluate_elites = true;
        const EvolutionResult r = evolve(config);
        CHECK(r.final[0].id == "g1s0");
        config.reevaluate_elites = false;
        const EvolutionResult cached = evolve(config);
        CHECK(cached.final[0].id.rfind("g0s", 0) == 0);
    }

    TEST_CASE("stats csv round trip") {
        GenerationStats s;
        s.generation = 7;
        s.best_fit = 0.125;
        s.mean_fit = 0.25;
        s.min_fit = 0.125;
        s.max_fit = 0.5;
        s.best_c0 = 0.4;
        s.mean_c0 = 0.41;
        s.min_c0 = 0.3;
        s.max_c0 = 0.6;
        s.best_id = "g7s0";
        std::stringstream buf;
        write_stats_header(buf);
        write_stats_row(buf, s);
        CHECK(buf.str() ==
              std::string(kStatsHeader) +
                  "\n7,0.125000000,0.250000000,0.125000000,0.500000000,0.400000000,0.410000000,0.300000000,"
                  "0.600000000,g7s0\n");
        const auto rows = read_stats_csv(buf);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].best_id == "g7s0");
        CHECK(rows[0].max_c0 == 0.6);
        std::istringstream empty("");
        CHECK_THROWS_AS(read_stats_csv(empty), MissingStats);
    }

    TEST_CASE("configuration validation") {
        EvolutionConfig c = tiny_config();
        CHECK_NOTHROW(c.validate());
        auto rejects = [](auto mutate) {
            EvolutionConfig bad = tiny_config();
            mutate(bad);
            CHECK_THROWS_AS(bad.validate(), InvalidArgument);
        };
        rejects([](EvolutionConfig& b) { b.population_size = 1; });
        rejects([](EvolutionConfig& b) { b.mutation_rate = 1.5; });
        rejects([](EvolutionConfig& b) { b.elite_count = 4; });
        rejects([](EvolutionConfig& b) { b.target = -0.1; });
        rejects([](EvolutionConfig& b) { b.scales = 6; });
        rejects([](EvolutionConfig& b) { b.world.channels = 2; });
        rejects([](EvolutionConfig& b) { b.bounds.R = {2.0, 25.0}; });
        rejects([](EvolutionConfig& b) { b.bounds.sigma = {0.0, 0.1}; });
        rejects([](EvolutionConfig& b) { b.dynamics.ell = 0.0; });
    }
}
