#include "flf/world.hpp"

#include "flf/errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace flf {

Planes::Planes(int h, int w, int c, double fill) : height(h), width(w), channels(c) {
    if (h < 0 || w < 0 || c < 0) {
        throw InvalidArgument("negative grid dimension");
    }
    values.assign(static_cast<std::size_t>(h) * w * c, fill);
}

double WorldState::total_mass() const {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum;
}

double WorldState::channel_mass(int c) const {
    double sum = 0.0;
    for (double v : plane(c)) {
        sum += v;
    }
    return sum;
}

bool WorldState::valid() const {
    for (double v : values) {
        if (!std::isfinite(v) || v < 0.0) {
            return false;
        }
    }
    return true;
}

WorldState shifted(const WorldState& state, int dy, int dx) {
    WorldState out(state.height, state.width, state.channels);
    const int h = state.height;
    const int w = state.width;
    for (int c = 0; c < state.channels; ++c) {
        for (int y = 0; y < h; ++y) {
            const int ty = ((y + dy) % h + h) % h;
            for (int x = 0; x < w; ++x) {
                const int tx = ((x + dx) % w + w) % w;
                out.at(ty, tx, c) = state.at(y, x, c);
            }
        }
    }
    return out;
}

namespace {

constexpr std::array<char, 4> kMagic{'F', 'L', 'S', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> bytes{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                                    static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes.data(), bytes.size());
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) {
        throw FormatError("truncated state file");
    }
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_state(std::ostream& out, const WorldState& state) {
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kStateFileVersion);
    put_u32(out, static_cast<std::uint32_t>(state.height));
    put_u32(out, static_cast<std::uint32_t>(state.width));
    put_u32(out, static_cast<std::uint32_t>(state.channels));
    for (int y = 0; y < state.height; ++y) {
        for (int x = 0; x < state.width; ++x) {
            for (int c = 0; c < state.channels; ++c) {
                put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(state.at(y, x, c))));
            }
        }
    }
    if (!out) {
        throw FormatError("failed to write state");
    }
}

WorldState read_state(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw FormatError("not a state file (bad magic)");
    }
    const std::uint32_t version = get_u32(in);
    if (version != kStateFileVersion) {
        throw FormatError("unsupported state file version " + std::to_string(version));
    }
    const std::uint32_t h = get_u32(in);
    const std::uint32_t w = get_u32(in);
    const std::uint32_t c = get_u32(in);
    constexpr std::uint32_t kMaxSide = 1u << 16;
    if (h == 0 || w == 0 || c == 0 || h > kMaxSide || w > kMaxSide || c > 64) {
        throw FormatError("implausible state dimensions");
    }
    WorldState state(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    for (int y = 0; y < state.height; ++y) {
        for (int x = 0; x < state.width; ++x) {
            for (int ch = 0; ch < state.channels; ++ch) {
                state.at(y, x, ch) = std::bit_cast<float>(get_u32(in));
            }
        }
    }
    return state;
}

void save_state(const std::filesystem::path& path, const WorldState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    write_state(out, state);
}

WorldState load_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return read_state(in);
}

}  // namespace flf
