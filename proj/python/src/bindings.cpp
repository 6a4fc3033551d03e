#include "flf/complexity.hpp"
#include "flf/errors.hpp"
#include "flf/harness.hpp"
#include "flf/png_codec.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

namespace py = pybind11;
using namespace flf;

namespace {

using StateArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ImageArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

WorldState to_state(const StateArray& a) {
    if (a.ndim() != 3) {
        throw py::value_error("state must be an (H, W, C) array");
    }
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    const auto c = static_cast<int>(a.shape(2));
    WorldState s(h, w, c);
    const auto v = a.unchecked<3>();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int k = 0; k < c; ++k) {
                s.at(y, x, k) = v(y, x, k);
            }
        }
    }
    return s;
}

StateArray from_state(const WorldState& s) {
    StateArray a({s.height, s.width, s.channels});
    auto v = a.mutable_unchecked<3>();
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            for (int k = 0; k < s.channels; ++k) {
                v(y, x, k) = s.at(y, x, k);
            }
        }
    }
    return a;
}

Image to_image(const ImageArray& a) {
    if (a.ndim() != 3 || a.shape(2) != 3) {
        throw py::value_error("image must be an (H, W, 3) uint8 array");
    }
    Image img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::memcpy(img.pixels.data(), a.data(), img.pixels.size());
    return img;
}

ImageArray from_image(const Image& img) {
    ImageArray a({img.height, img.width, 3});
    std::memcpy(a.mutable_data(), img.pixels.data(), img.pixels.size());
    return a;
}

nlohmann::json to_json(const py::object& obj) {
    const auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
    return nlohmann::json::parse(text);
}

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Wiring to_wiring(const std::vector<std::pair<int, int>>& pairs) { return {pairs.begin(), pairs.end()}; }

py::dict stats_dict(const GenerationStats& s) {
    py::dict d;
    d["gen"] = s.generation;
    d["best_fit"] = s.best_fit;
    d["mean_fit"] = s.mean_fit;
    d["min_fit"] = s.min_fit;
    d["max_fit"] = s.max_fit;
    d["best_c0"] = s.best_c0;
    d["mean_c0"] = s.mean_c0;
    d["min_c0"] = s.min_c0;
    d["max_c0"] = s.max_c0;
    d["best_id"] = s.best_id;
    return d;
}

py::list population_list(const std::vector<Individual>& pop) {
    py::list out;
    for (const Individual& ind : pop) {
        py::dict d;
        d["id"] = ind.id;
        d["genes"] = ind.genome.genes;
        d["fitness"] = ind.eval.fitness;
        d["profile"] = ind.eval.profile.values;
        d["init_seed"] = ind.eval.init_seed;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Flow Lenia simulation, compression complexity and evolution";
    m.attr("__version__") = FLF_VERSION;

    py::register_exception<Error>(m, "FlfError", PyExc_RuntimeError);

    m.def("encoder_info", [] {
        const EncoderInfo info = encoder_info();
        return py::dict(py::arg("library") = info.library,
                        py::arg("compression_level") = info.settings.compression_level);
    });

    m.def(
        "init_state",
        [](std::uint64_t seed, int height, int width, int channels, int patch) {
            return from_state(init_state(seed, height, width, channels, patch));
        },
        py::arg("seed"), py::arg("height") = 256, py::arg("width") = 256, py::arg("channels") = kDefaultChannels,
        py::arg("patch") = 64, "Centered random patch, as an (H, W, C) float64 array.");

    m.def(
        "sample_genome",
        [](std::uint64_t seed) {
            const SearchSpace space;
            Rng rng(seed);
            const Wiring wiring = sample_wiring(kKernelCount, kDefaultChannels, rng);
            return py::make_tuple(sample_genome(space, rng).genes, wiring);
        },
        py::arg("seed"), "Random (genes, wiring) from the default search space.");

    m.def(
        "load_genome",
        [](const std::filesystem::path& path) {
            const GenomeFile f = load_genome(path, SearchSpace());
            return py::make_tuple(f.genome.genes, f.wiring);
        },
        py::arg("path"));

    m.def(
        "simulate",
        [](const std::vector<double>& genes, const std::vector<std::pair<int, int>>& wiring, const StateArray& state,
           int steps) {
            WorldState s = to_state(state);
            const UpdateRule rule = decode_rule(Genome{genes}, SearchSpace(), to_wiring(wiring));
            const CompiledRule compiled(rule, s.height, s.width, s.channels);
            {
                py::gil_scoped_release release;
                Simulator(compiled).run(s, steps);
            }
            return from_state(s);
        },
        py::arg("genes"), py::arg("wiring"), py::arg("state"), py::arg("steps"),
        "Advance a state by `steps` updates of the rule decoded from a genome.");

    m.def(
        "state_image", [](const StateArray& state) { return from_image(state_to_image(to_state(state))); },
        py::arg("state"), "Three-channel state rendered as an (H, W, 3) uint8 image.");

    m.def(
        "mass_center",
        [](const StateArray& state) {
            const Point p = mass_center(to_state(state));
            return py::make_tuple(p.y, p.x);
        },
        py::arg("state"));

    m.def(
        "polar_resample",
        [](const ImageArray& img, std::pair<double, double> center) {
            return from_image(polar_resample(to_image(img), {center.first, center.second}));
        },
        py::arg("image"), py::arg("center"));

    m.def(
        "compression_complexity", [](const ImageArray& img) { return compression_complexity(to_image(img)); },
        py::arg("image"), "Encoded PNG size over raw RGB size.");

    m.def(
        "complexity_profile",
        [](const StateArray& state, int scales, bool polar) {
            return complexity_profile(to_state(state), scales, polar).values;
        },
        py::arg("state"), py::arg("scales") = kDefaultScales, py::arg("polar") = true);

    m.def(
        "fitness", [](const std::vector<double>& profile, double target) {
            return fitness(ComplexityProfile{profile}, target);
        },
        py::arg("profile"), py::arg("target"));

    m.def(
        "evolve",
        [](const py::object& config, unsigned workers) {
            const ExperimentConfig c = config_from_json(to_json(config));
            EvolutionResult result;
            {
                py::gil_scoped_release release;
                result = evolve(c.evolution, workers);
            }
            py::list history;
            for (const GenerationStats& s : result.history) {
                history.append(stats_dict(s));
            }
            py::dict out;
            out["wiring"] = result.wiring;
            out["history"] = history;
            out["initial"] = population_list(result.initial);
            out["final"] = population_list(result.final);
            return out;
        },
        py::arg("config") = py::dict(), py::arg("workers") = 1,
        "Run the genetic algorithm in memory; `config` uses the JSON config keys.");

    m.def(
        "run_experiment",
        [](const py::object& config) {
            const ExperimentConfig c = config_from_json(to_json(config));
            std::filesystem::path dir;
            {
                py::gil_scoped_release release;
                dir = run_experiment(c);
                emit_charts(dir);
            }
            return dir;
        },
        py::arg("config"), "Run and persist an experiment with charts; returns the run directory.");

    m.def(
        "default_config", [] { return from_json(config_to_json(ExperimentConfig{})); },
        "The full default configuration as a dict.");
}
