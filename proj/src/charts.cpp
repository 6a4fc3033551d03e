#include "flf/errors.hpp"
#include "flf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace flf {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Linear map from data space to the plot rectangle.
struct Frame {
    double x_lo, x_hi, y_lo, y_hi;

    [[nodiscard]] double px(double x) const {
        return kLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kLeft - kRight);
    }
    [[nodiscard]] double py(double y) const {
        return kHeight - kBottom - (y - y_lo) / (y_hi - y_lo) * (kHeight - kTop - kBottom);
    }
};

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

void open_svg(std::ostringstream& s, const std::string& title) {
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
}

void axes(std::ostringstream& s, const Frame& f, double x_step, double y_step, const std::string& x_label,
          const std::string& y_label, bool integer_x) {
    const double x0 = f.px(f.x_lo);
    const double x1 = f.px(f.x_hi);
    const double y0 = f.py(f.y_lo);
    const double y1 = f.py(f.y_hi);
    s << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y0) << "\"/>\n"
      << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y1) << "\"/>\n"
      << "</g>\n";
    const int nx = static_cast<int>(std::floor((f.x_hi - f.x_lo) / x_step + 1e-9));
    for (int i = 0; i <= nx; ++i) {
        const double v = f.x_lo + i * x_step;
        const double x = f.px(v);
        s << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(y0 + 5)
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y0 + 18) << "\" text-anchor=\"middle\">"
          << (integer_x ? std::to_string(static_cast<long>(std::lround(v))) : fmt(v)) << "</text>\n";
    }
    const int ny = static_cast<int>(std::floor((f.y_hi - f.y_lo) / y_step + 1e-9));
    for (int i = 0; i <= ny; ++i) {
        const double v = f.y_lo + i * y_step;
        const double y = f.py(v);
        s << "<line x1=\"" << fmt(x0 - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x0) << "\" y2=\"" << fmt(y)
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">"
          << (y_step >= 1.0 ? std::to_string(static_cast<long>(std::lround(v))) : fmt(v)) << "</text>\n";
    }
    s << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(kHeight - 18) << "\" text-anchor=\"middle\">"
      << x_label << "</text>\n"
      << "<text x=\"18\" y=\"" << fmt((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt((y0 + y1) / 2) << ")\">" << y_label << "</text>\n";
}

void legend_entry(std::ostringstream& s, double x, double y, const std::string& swatch, const std::string& label) {
    s << "<g transform=\"translate(" << fmt(x) << ',' << fmt(y) << ")\">" << swatch << "<text x=\"30\" y=\"4\">"
      << label << "</text></g>\n";
}

}  // namespace

std::string trend_svg(const std::vector<GenerationStats>& stats) {
    if (stats.empty()) {
        throw MissingStats("no generations to plot");
    }
    double top = 1.0;
    for (const auto& row : stats) {
        top = std::max(top, row.max_c0);
    }
    const double last_gen = std::max(1, stats.back().generation);
    const Frame f{0.0, last_gen, 0.0, std::ceil(top * 10.0) / 10.0};

    std::ostringstream s;
    open_svg(s, "Complexity evolution trend");
    axes(s, f, std::max(1.0, nice_step(last_gen, 10)), 0.1, "generation", "scale-0 complexity C(x, 0)", true);

    const std::string band_color = "#9ecae1";
    const std::string line_color = "#08519c";
    if (stats.size() == 1) {
        const auto& row = stats.front();
        s << "<line x1=\"" << fmt(f.px(row.generation)) << "\" y1=\"" << fmt(f.py(row.min_c0)) << "\" x2=\""
          << fmt(f.px(row.generation)) << "\" y2=\"" << fmt(f.py(row.max_c0)) << "\" stroke=\"" << band_color
          << "\" stroke-width=\"8\"/>\n"
          << "<circle cx=\"" << fmt(f.px(row.generation)) << "\" cy=\"" << fmt(f.py(row.mean_c0))
          << "\" r=\"3\" fill=\"none\" stroke=\"" << line_color << "\"/>\n"
          << "<circle cx=\"" << fmt(f.px(row.generation)) << "\" cy=\"" << fmt(f.py(row.best_c0)) << "\" r=\"4\" fill=\""
          << line_color << "\"/>\n";
    } else {
        s << "<polygon fill=\"" << band_color << "\" fill-opacity=\"0.6\" stroke=\"none\" points=\"";
        for (const auto& row : stats) {
            s << fmt(f.px(row.generation)) << ',' << fmt(f.py(row.max_c0)) << ' ';
        }
        for (auto it = stats.rbegin(); it != stats.rend(); ++it) {
            s << fmt(f.px(it->generation)) << ',' << fmt(f.py(it->min_c0)) << ' ';
        }
        s << "\"/>\n";
        s << "<polyline fill=\"none\" stroke=\"" << line_color << "\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\" points=\"";
        for (const auto& row : stats) {
            s << fmt(f.px(row.generation)) << ',' << fmt(f.py(row.mean_c0)) << ' ';
        }
        s << "\"/>\n";
        s << "<polyline fill=\"none\" stroke=\"" << line_color << "\" stroke-width=\"3\" points=\"";
        for (const auto& row : stats) {
            s << fmt(f.px(row.generation)) << ',' << fmt(f.py(row.best_c0)) << ' ';
        }
        s << "\"/>\n";
    }
    const double lx = kLeft + 15;
    legend_entry(s, lx, kTop + 10,
                 "<line x1=\"0\" y1=\"0\" x2=\"24\" y2=\"0\" stroke=\"" + line_color + "\" stroke-width=\"3\"/>", "Best");
    legend_entry(s, lx, kTop + 26,
                 "<line x1=\"0\" y1=\"0\" x2=\"24\" y2=\"0\" stroke=\"" + line_color +
                     "\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>",
                 "Mean");
    legend_entry(s, lx, kTop + 42,
                 "<rect x=\"0\" y=\"-5\" width=\"24\" height=\"10\" fill=\"" + band_color + "\" fill-opacity=\"0.6\"/>",
                 "Min-Max range");
    s << "</svg>\n";
    return s.str();
}

std::string histogram_svg(const std::vector<double>& initial, const std::vector<double>& final, double best,
                          const ChartOptions& options) {
    if (!(options.bin_width > 0.0) || !(options.range_hi > options.range_lo)) {
        throw InvalidArgument("histogram needs a positive bin width and range");
    }
    const auto bins = static_cast<std::size_t>(std::lround((options.range_hi - options.range_lo) / options.bin_width));
    auto count = [&](const std::vector<double>& values) {
        std::vector<int> counts(bins, 0);
        for (double v : values) {
            auto b = static_cast<long>(std::floor((v - options.range_lo) / options.bin_width));
            b = std::clamp(b, 0L, static_cast<long>(bins) - 1);
            ++counts[static_cast<std::size_t>(b)];
        }
        return counts;
    };
    const auto c_init = count(initial);
    const auto c_final = count(final);
    int peak = 1;
    for (std::size_t b = 0; b < bins; ++b) {
        peak = std::max({peak, c_init[b], c_final[b]});
    }
    const double y_step = std::max(1.0, nice_step(peak, 5));
    const Frame f{options.range_lo, options.range_hi, 0.0, std::ceil(peak / y_step) * y_step};

    std::ostringstream s;
    open_svg(s, "Complexity distribution");
    axes(s, f, nice_step(options.range_hi - options.range_lo, 6), y_step, "scale-0 complexity C(x, 0)", "individuals",
         false);
    auto bars = [&](const std::vector<int>& counts, const std::string& color) {
        s << "<g fill=\"" << color << "\" fill-opacity=\"0.6\">\n";
        for (std::size_t b = 0; b < bins; ++b) {
            if (counts[b] == 0) {
                continue;
            }
            const double lo = options.range_lo + b * options.bin_width;
            const double x0 = f.px(lo);
            const double x1 = f.px(lo + options.bin_width);
            const double y = f.py(counts[b]);
            s << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(x1 - x0) << "\" height=\""
              << fmt(f.py(0.0) - y) << "\"/>\n";
        }
        s << "</g>\n";
    };
    bars(c_init, "#969696");
    bars(c_final, "#d62728");
    const double bx = f.px(std::clamp(best, options.range_lo, options.range_hi));
    s << "<line x1=\"" << fmt(bx) << "\" y1=\"" << fmt(f.py(0.0)) << "\" x2=\"" << fmt(bx) << "\" y2=\""
      << fmt(f.py(f.y_hi)) << "\" stroke=\"#67000d\" stroke-width=\"3\"/>\n";

    const double lx = kWidth - kRight - 170;
    legend_entry(s, lx, kTop + 10, "<rect x=\"0\" y=\"-5\" width=\"24\" height=\"10\" fill=\"#969696\" fill-opacity=\"0.6\"/>",
                 "Initial generation");
    legend_entry(s, lx, kTop + 26, "<rect x=\"0\" y=\"-5\" width=\"24\" height=\"10\" fill=\"#d62728\" fill-opacity=\"0.6\"/>",
                 "Final generation");
    legend_entry(s, lx, kTop + 42, "<line x1=\"0\" y1=\"0\" x2=\"24\" y2=\"0\" stroke=\"#67000d\" stroke-width=\"3\"/>",
                 "Best");
    s << "</svg>\n";
    return s.str();
}

void emit_charts(const fs::path& run_dir, const ChartOptions& options) {
    std::ifstream in(run_dir / "stats.csv");
    if (!in) {
        throw MissingStats("no stats.csv in " + run_dir.string());
    }
    const auto stats = read_stats_csv(in);
    if (stats.empty()) {
        throw MissingStats("stats.csv in " + run_dir.string() + " has no rows");
    }
    const auto initial = read_histogram_csv(run_dir / "hist_initial.csv");
    // A run stopped after generation 0 has no final histogram; plot the initial one alone.
    const fs::path final_path = run_dir / "hist_final.csv";
    const auto final = fs::exists(final_path) ? read_histogram_csv(final_path) : std::vector<double>{};

    std::ofstream trend(run_dir / "trend.svg", std::ios::binary);
    trend << trend_svg(stats);
    std::ofstream hist(run_dir / "hist.svg", std::ios::binary);
    hist << histogram_svg(initial, final, stats.back().best_c0, options);
    if (!trend || !hist) {
        throw Error("cannot write charts into " + run_dir.string());
    }
}

}  // namespace flf
