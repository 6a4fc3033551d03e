#include "flf/errors.hpp"
#include "flf/harness.hpp"
#include "flf/png_codec.hpp"

#include <CLI11.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

namespace flf {

namespace fs = std::filesystem;

namespace {

// Usage problems detected after parsing (bad config content, inconsistent
// options) exit like parse errors.
class UsageError : public Error {
public:
    using Error::Error;
};

struct EvolveArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

struct SimulateArgs {
    std::string genome;
    int steps = 0;
    int dump_every = 0;
    std::string out = ".";
    std::uint64_t seed = 0;
    int height = 256;
    int width = 256;
    int patch = 64;
};

struct ComplexityArgs {
    std::string input;
    int scales = kDefaultScales;
    double target = 0.5;
    bool polar = true;
};

int run_evolve(const EvolveArgs& args, std::ostream& out) {
    ExperimentConfig config;
    try {
        config = load_config(args.config);
        if (args.seed) {
            config.evolution.seed = *args.seed;
        }
        if (args.out) {
            config.output_dir = *args.out;
        }
        config.validate();
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    const fs::path dir = run_experiment(config);
    emit_charts(dir);
    out << dir.string() << '\n';
    return 0;
}

int run_simulate(const SimulateArgs& args, std::ostream& out) {
    const SearchSpace space;
    const GenomeFile file = load_genome(args.genome, space);
    const UpdateRule rule = decode_rule(file.genome, space, file.wiring);
    const CompiledRule compiled(rule, args.height, args.width, kDefaultChannels);
    WorldState state = init_state(args.seed, args.height, args.width, kDefaultChannels, args.patch);

    const fs::path dir = args.out;
    fs::create_directories(dir);
    auto dump = [&](int step) {
        const std::string stem = "state_" + std::to_string(step);
        save_state(dir / (stem + ".flst"), state);
        write_png(dir / (stem + ".png"), state_to_image(state));
        out << (dir / (stem + ".flst")).string() << '\n';
    };
    dump(0);
    Simulator sim(compiled);
    for (int step = 1; step <= args.steps; ++step) {
        sim.step(state);
        if (step == args.steps || (args.dump_every > 0 && step % args.dump_every == 0)) {
            dump(step);
        }
    }
    return 0;
}

int run_complexity(const ComplexityArgs& args, std::ostream& out) {
    std::ifstream in(args.input, std::ios::binary);
    std::array<char, 8> head{};
    in.read(head.data(), head.size());
    if (!in) {
        throw FormatError(args.input + " is too short to be a state file or PNG");
    }
    in.close();

    Image img;
    if (std::string_view(head.data(), 4) == "FLST") {
        const WorldState state = load_state(args.input);
        img = assessed_image(state, args.polar);
    } else if (static_cast<unsigned char>(head[0]) == 0x89 && std::string_view(head.data() + 1, 3) == "PNG") {
        img = read_png(args.input);
        if (args.polar) {
            img = polar_resample(img, mass_center(img));
        }
    } else {
        throw FormatError(args.input + " is neither a state file nor a PNG");
    }
    const ComplexityProfile profile = image_profile(img, args.scales);
    write_profile_csv(out, profile);
    char buf[128];
    std::snprintf(buf, sizeof buf, "fitness=%.9f (T=%g, S=%d)\n", fitness(profile, args.target), args.target,
                  args.scales);
    out << buf;
    return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flow Lenia simulation, multi-scale compression complexity and evolution toolkit", "flf"};
    app.set_version_flag("--version", std::string("flf ") + FLF_VERSION + " (" + encoder_info().library + ")");
    app.require_subcommand(1);

    EvolveArgs evolve_args;
    auto* evolve_cmd = app.add_subcommand("evolve", "Run a genetic algorithm experiment");
    evolve_cmd->add_option("--config", evolve_args.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    evolve_cmd->add_option("--seed", evolve_args.seed, "Override the config seed");
    evolve_cmd->add_option("--out", evolve_args.out, "Override the output directory");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Roll out one genome and dump states");
    sim_cmd->add_option("--genome", sim_args.genome, "Genome JSON file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--steps", sim_args.steps, "Number of updates")->required()->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--dump-every", sim_args.dump_every, "Dump every K steps (0: initial and final only)")
        ->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--out", sim_args.out, "Output directory");
    sim_cmd->add_option("--seed", sim_args.seed, "Initial-state seed");
    sim_cmd->add_option("--height", sim_args.height, "World height")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--width", sim_args.width, "World width")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--patch", sim_args.patch, "Side of the initial random patch")->check(CLI::NonNegativeNumber);

    ComplexityArgs cx_args;
    auto* cx_cmd = app.add_subcommand("complexity", "Print the complexity profile and fitness of a state or PNG");
    cx_cmd->add_option("--input", cx_args.input, "State file (.flst) or PNG")->required()->check(CLI::ExistingFile);
    cx_cmd->add_option("--scales", cx_args.scales, "Number of extra dyadic scales S")->check(CLI::Range(0, 15));
    cx_cmd->add_option("--target", cx_args.target, "Complexity target T")->check(CLI::Range(0.0, 1.0));
    cx_cmd->add_flag("--polar,!--no-polar", cx_args.polar, "Resample to polar coordinates first (default on)");

    std::string plot_dir;
    auto* plot_cmd = app.add_subcommand("plot", "Write trend.svg and hist.svg for a run directory");
    plot_cmd->add_option("--run", plot_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*evolve_cmd) {
            return run_evolve(evolve_args, out);
        }
        if (*sim_cmd) {
            return run_simulate(sim_args, out);
        }
        if (*cx_cmd) {
            return run_complexity(cx_args, out);
        }
        if (*plot_cmd) {
            emit_charts(plot_dir);
            out << (fs::path(plot_dir) / "trend.svg").string() << '\n'
                << (fs::path(plot_dir) / "hist.svg").string() << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace flf
