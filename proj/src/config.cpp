#include "flf/errors.hpp"
#include "flf/harness.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace flf {

using nlohmann::json;

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) {
            throw ConfigError(where_ + " must be a JSON object");
        }
    }

    template <typename T>
    void read(const char* key, T& out) {
        known_.insert(key);
        if (!j_.contains(key)) {
            return;
        }
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where_ + "." + key + ": " + e.what());
        }
    }

    void read(const char* key, Interval& out) {
        known_.insert(key);
        if (!j_.contains(key)) {
            return;
        }
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(where_ + "." + key + " must be a [lo, hi] pair");
        }
        out = {v[0].get<double>(), v[1].get<double>()};
    }

    const json* object(const char* key) {
        known_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!known_.contains(key)) {
                throw ConfigError("unknown key '" + key + "' in " + where_);
            }
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> known_;
};

}  // namespace

void ExperimentConfig::validate() const {
    try {
        evolution.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (dump_every < 0) {
        throw ConfigError("dump_every must be non-negative");
    }
    if (workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    if (output_dir.empty()) {
        throw ConfigError("output_dir must not be empty");
    }
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    EvolutionConfig& e = c.evolution;
    ObjectReader top(j, "config");
    top.read("population_size", e.population_size);
    top.read("generations", e.generations);
    top.read("mutation_rate", e.mutation_rate);
    top.read("crossover_gene_prob", e.crossover_gene_prob);
    top.read("elite_count", e.elite_count);
    top.read("target", e.target);
    top.read("scales", e.scales);
    top.read("rollout_steps", e.rollout_steps);
    top.read("seed", e.seed);
    top.read("polar", e.polar);
    top.read("reevaluate_elites", e.reevaluate_elites);
    top.read("dump_every", c.dump_every);
    top.read("workers", c.workers);
    std::string out_dir = c.output_dir.string();
    top.read("output_dir", out_dir);
    c.output_dir = out_dir;

    if (const json* w = top.object("world")) {
        ObjectReader r(*w, "world");
        r.read("height", e.world.height);
        r.read("width", e.world.width);
        r.read("channels", e.world.channels);
        r.read("patch", e.world.patch);
        r.finish();
    }
    if (const json* b = top.object("bounds")) {
        ObjectReader r(*b, "bounds");
        r.read("R", e.bounds.R);
        r.read("r", e.bounds.r);
        r.read("h", e.bounds.h);
        r.read("mu", e.bounds.mu);
        r.read("sigma", e.bounds.sigma);
        r.read("a", e.bounds.a);
        r.read("b", e.bounds.b);
        r.read("w", e.bounds.w);
        r.finish();
    }
    if (const json* d = top.object("dynamics")) {
        ObjectReader r(*d, "dynamics");
        r.read("dt", e.dynamics.dt);
        r.read("theta_A", e.dynamics.theta_A);
        r.read("n_alpha", e.dynamics.n_alpha);
        r.read("ell", e.dynamics.ell);
        r.read("d_max", e.dynamics.d_max);
        r.finish();
    }
    if (const json* en = top.object("encoder")) {
        ObjectReader r(*en, "encoder");
        r.read("compression_level", e.encoder.compression_level);
        r.read("mem_level", e.encoder.mem_level);
        r.read("window_bits", e.encoder.window_bits);
        r.read("strategy", e.encoder.strategy);
        r.read("adaptive_filters", e.encoder.adaptive_filters);
        r.finish();
    }
    top.finish();
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    const EvolutionConfig& e = c.evolution;
    auto pair = [](const Interval& iv) { return json::array({iv.lo, iv.hi}); };
    return json{
        {"population_size", e.population_size},
        {"generations", e.generations},
        {"mutation_rate", e.mutation_rate},
        {"crossover_gene_prob", e.crossover_gene_prob},
        {"elite_count", e.elite_count},
        {"target", e.target},
        {"scales", e.scales},
        {"rollout_steps", e.rollout_steps},
        {"seed", e.seed},
        {"polar", e.polar},
        {"reevaluate_elites", e.reevaluate_elites},
        {"dump_every", c.dump_every},
        {"workers", c.workers},
        {"output_dir", c.output_dir.string()},
        {"world",
         {{"height", e.world.height}, {"width", e.world.width}, {"channels", e.world.channels}, {"patch", e.world.patch}}},
        {"bounds",
         {{"R", pair(e.bounds.R)},
          {"r", pair(e.bounds.r)},
          {"h", pair(e.bounds.h)},
          {"mu", pair(e.bounds.mu)},
          {"sigma", pair(e.bounds.sigma)},
          {"a", pair(e.bounds.a)},
          {"b", pair(e.bounds.b)},
          {"w", pair(e.bounds.w)}}},
        {"dynamics",
         {{"dt", e.dynamics.dt},
          {"theta_A", e.dynamics.theta_A},
          {"n_alpha", e.dynamics.n_alpha},
          {"ell", e.dynamics.ell},
          {"d_max", e.dynamics.d_max}}},
        {"encoder",
         {{"compression_level", e.encoder.compression_level},
          {"mem_level", e.encoder.mem_level},
          {"window_bits", e.encoder.window_bits},
          {"strategy", e.encoder.strategy},
          {"adaptive_filters", e.encoder.adaptive_filters}}},
    };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

unsigned resolve_workers(const ExperimentConfig& config) {
    if (const char* env = std::getenv("FLF_THREADS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 1 && v <= 1024) {
            return static_cast<unsigned>(v);
        }
        throw ConfigError(std::string("FLF_THREADS must be an integer in [1, 1024], got '") + env + "'");
    }
    return config.workers;
}

json genome_to_json(const Genome& genome, const Wiring& wiring, const SearchSpace& space) {
    json wiring_json = json::array();
    for (const auto& [src, dst] : wiring) {
        wiring_json.push_back({src, dst});
    }
    return json{{"space_version", kSearchSpaceVersion},
                {"gene_names", space.names()},
                {"genes", genome.genes},
                {"wiring", wiring_json}};
}

GenomeFile genome_from_json(const json& j, const SearchSpace& space) {
    GenomeFile f;
    try {
        if (j.at("space_version").get<int>() != kSearchSpaceVersion) {
            throw FormatError("unsupported genome space_version");
        }
        const auto names = j.at("gene_names").get<std::vector<std::string>>();
        if (names != space.names()) {
            throw FormatError("genome gene_names do not match the search space layout");
        }
        f.genome.genes = j.at("genes").get<std::vector<double>>();
        for (const json& pair : j.at("wiring")) {
            f.wiring.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed genome file: ") + e.what());
    }
    if (f.genome.genes.size() != space.size()) {
        throw FormatError("genome has the wrong number of genes");
    }
    if (f.wiring.size() != static_cast<std::size_t>(space.kernel_count())) {
        throw FormatError("genome wiring does not match the kernel count");
    }
    return f;
}

void save_genome(const std::filesystem::path& path, const Genome& genome, const Wiring& wiring,
                 const SearchSpace& space) {
    std::ofstream out(path);
    out << genome_to_json(genome, wiring, space).dump(2) << '\n';
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

GenomeFile load_genome(const std::filesystem::path& path, const SearchSpace& space) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open genome " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError("genome " + path.string() + " is not valid JSON: " + e.what());
    }
    return genome_from_json(j, space);
}

}  // namespace flf
