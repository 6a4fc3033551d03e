#pragma once

#include "flf/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace flf {

/// Pinned PNG encoder configuration. Compressed sizes depend on every one of
/// these, so they are recorded alongside any run that reports ratios.
struct EncoderSettings {
    int compression_level = 9;  // zlib maximum effort
    int mem_level = 9;
    int window_bits = 15;
    int strategy = 0;  // Z_DEFAULT_STRATEGY
    bool adaptive_filters = true;  // libpng per-row choice among all five filters
    bool operator==(const EncoderSettings&) const = default;
};

struct EncoderInfo {
    std::string library;  // e.g. "libpng 1.6.37 / zlib 1.2.11"
    EncoderSettings settings;
};

EncoderInfo encoder_info();

/// Whole PNG file (signature + IHDR + IDAT + IEND), 8-bit RGB, no interlace,
/// no ancillary chunks. Throws EncodeFailure.
std::vector<std::uint8_t> encode_png(const Image& img, const EncoderSettings& settings = {});

/// Decodes any PNG to 8-bit RGB. Throws FormatError.
Image decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Image& img);
Image read_png(const std::filesystem::path& path);

}  // namespace flf
