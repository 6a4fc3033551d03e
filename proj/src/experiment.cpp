#include "flf/errors.hpp"
#include "flf/harness.hpp"
#include "flf/png_codec.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace flf {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

void write_histogram(const fs::path& path, std::span<const Individual> population) {
    std::ostringstream out;
    out << "id,c0,fitness\n";
    char buf[128];
    for (const Individual& ind : population) {
        std::snprintf(buf, sizeof buf, ",%.9f,%.9f\n", ind.eval.profile.values.at(0), ind.eval.fitness);
        out << ind.id << buf;
    }
    write_text(path, out.str());
}

json population_json(std::span<const Individual> population, const Wiring& wiring, const SearchSpace& space) {
    json arr = json::array();
    for (const Individual& ind : population) {
        arr.push_back({{"id", ind.id},
                       {"fitness", ind.eval.fitness},
                       {"profile", ind.eval.profile.values},
                       {"init_seed", ind.eval.init_seed},
                       {"genome", genome_to_json(ind.genome, wiring, space)}});
    }
    return arr;
}

void dump_best(const fs::path& dir, int generation, const Individual& best, const Wiring& wiring,
               const EvolutionConfig& config, const SearchSpace& space) {
    const WorldState state = rollout(best.genome, wiring, config, best.eval.init_seed);
    const std::string stem = "gen" + std::to_string(generation) + "_best";
    const Image cartesian = state_to_image(state);
    write_png(dir / (stem + ".png"), cartesian);
    write_png(dir / (stem + "_polar.png"), polar_resample(cartesian, mass_center(state)));
    save_state(dir / (stem + ".flst"), state);
    save_genome(dir / (stem + ".genome.json"), best.genome, wiring, space);
    std::ostringstream profile;
    write_profile_csv(profile, best.eval.profile);
    write_text(dir / (stem + ".profile.csv"), profile.str());
}

}  // namespace

std::vector<int> dump_generations(int generations, int dump_every) {
    std::vector<int> out;
    if (dump_every <= 0) {
        return out;
    }
    for (int g = 0; g <= generations; g += dump_every) {
        out.push_back(g);
    }
    if (out.back() != generations) {
        out.push_back(generations);
    }
    return out;
}

fs::path run_directory(const ExperimentConfig& config) {
    return config.output_dir / ("run-" + std::to_string(config.evolution.seed));
}

fs::path run_experiment(const ExperimentConfig& config) {
    config.validate();
    const unsigned workers = resolve_workers(config);
    const EvolutionConfig& evo = config.evolution;
    const SearchSpace space(evo.bounds);
    const fs::path dir = run_directory(config);
    fs::create_directories(dir);
    fs::remove(dir / "INCOMPLETE");

    Rng wiring_rng(evo.seed);
    const Wiring wiring = experiment_wiring(evo, wiring_rng);
    const EncoderInfo encoder = encoder_info();

    json wiring_json = json::array();
    for (const auto& [src, dst] : wiring) {
        wiring_json.push_back({src, dst});
    }
    json manifest = {
        {"tool", "flf"},
        {"version", FLF_VERSION},
        {"seed", evo.seed},
        {"config", config_to_json(config)},
        {"workers", workers},
        {"encoder",
         {{"library", encoder.library},
          {"format", "PNG 8-bit RGB, no alpha, no interlace, no ancillary chunks"},
          {"compression_level", evo.encoder.compression_level},
          {"mem_level", evo.encoder.mem_level},
          {"window_bits", evo.encoder.window_bits},
          {"strategy", evo.encoder.strategy},
          {"adaptive_filters", evo.encoder.adaptive_filters}}},
        {"space", {{"space_version", kSearchSpaceVersion}, {"gene_names", space.names()}}},
        {"wiring", wiring_json},
        {"started_at", utc_timestamp()},
        {"status", "running"},
    };

    try {
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
        std::ofstream stats(dir / "stats.csv", std::ios::binary);
        if (!stats) {
            throw Error("cannot write " + (dir / "stats.csv").string());
        }
        write_stats_header(stats);
        const auto dumps = dump_generations(evo.generations, config.dump_every);

        auto observer = [&](int gen, std::span<const Individual> population, const GenerationStats& row) {
            write_stats_row(stats, row);
            stats.flush();
            if (!stats) {
                throw Error("failed writing stats.csv");
            }
            if (gen == 0) {
                write_histogram(dir / "hist_initial.csv", population);
            }
            if (std::find(dumps.begin(), dumps.end(), gen) != dumps.end()) {
                dump_best(dir, gen, population[best_index(population)], wiring, evo, space);
            }
        };
        const EvolutionResult result = evolve(evo, workers, observer);
        if (result.wiring != wiring) {
            throw Error("internal: wiring drawn by the harness differs from the evolution's");
        }
        if (evo.generations > 0) {
            write_histogram(dir / "hist_final.csv", result.final);
        }
        write_text(dir / "final_population.json", population_json(result.final, wiring, space).dump(2) + "\n");

        manifest["finished_at"] = utc_timestamp();
        manifest["status"] = "complete";
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::ofstream marker(dir / "INCOMPLETE");
        marker << "run aborted: " << e.what() << '\n';
        throw;
    }
    return dir;
}

std::vector<double> read_histogram_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingStats("missing histogram data " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "id,c0,fitness") {
        throw MissingStats("histogram data " + path.string() + " lacks its header");
    }
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto first = line.find(',');
        const auto second = line.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos) {
            throw MissingStats("malformed histogram row: " + line);
        }
        try {
            values.push_back(std::stod(line.substr(first + 1, second - first - 1)));
        } catch (const std::logic_error&) {
            throw MissingStats("malformed histogram row: " + line);
        }
    }
    return values;
}

}  // namespace flf
