#pragma once

#include "flf/evolution.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace flf {

struct ExperimentConfig {
    EvolutionConfig evolution;
    std::filesystem::path output_dir = "runs";
    int dump_every = 10;   // generations between best-individual dumps; 0 disables
    unsigned workers = 1;  // parallel evaluations; FLF_THREADS overrides

    void validate() const;
};

// Config file: flat JSON with nested "world", "bounds", "dynamics" and
// "encoder" objects. Unknown keys are rejected with ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Worker count after applying the FLF_THREADS environment override.
unsigned resolve_workers(const ExperimentConfig& config);

// Genome file: {space_version, gene_names[], genes[], wiring[[src, dst], ...]}.
struct GenomeFile {
    Genome genome;
    Wiring wiring;
};

nlohmann::json genome_to_json(const Genome& genome, const Wiring& wiring, const SearchSpace& space);
GenomeFile genome_from_json(const nlohmann::json& j, const SearchSpace& space);
void save_genome(const std::filesystem::path& path, const Genome& genome, const Wiring& wiring,
                 const SearchSpace& space);
GenomeFile load_genome(const std::filesystem::path& path, const SearchSpace& space);

/// Directory `<output_dir>/run-<seed>` for a config.
std::filesystem::path run_directory(const ExperimentConfig& config);

/// Runs the evolution and persists manifest.json, stats.csv, periodic dumps of
/// the best individual, the final population and the histogram data. On
/// failure an INCOMPLETE marker is left in the run directory and the error is
/// rethrown. Returns the run directory.
std::filesystem::path run_experiment(const ExperimentConfig& config);

/// Generations at which the best individual is dumped.
std::vector<int> dump_generations(int generations, int dump_every);

struct ChartOptions {
    double bin_width = 0.02;
    double range_lo = 0.0;
    double range_hi = 1.2;
};

/// Writes trend.svg and hist.svg into the run directory. Throws MissingStats.
void emit_charts(const std::filesystem::path& run_dir, const ChartOptions& options = {});

std::string trend_svg(const std::vector<GenerationStats>& stats);
std::string histogram_svg(const std::vector<double>& initial, const std::vector<double>& final, double best,
                          const ChartOptions& options = {});

/// Reads the `c0` column of a histogram CSV (header `id,c0,fitness`).
std::vector<double> read_histogram_csv(const std::filesystem::path& path);

/// Command-line entry point. Exit codes: 0 success, 1 runtime failure,
/// 2 usage or configuration error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flf
