#include "flf/png_codec.hpp"

#include "flf/errors.hpp"

#include <png.h>
#include <zlib.h>

#include <csetjmp>
#include <fstream>
#include <iterator>

namespace flf {

EncoderInfo encoder_info() {
    return {std::string("libpng ") + PNG_LIBPNG_VER_STRING + " / zlib " + ZLIB_VERSION, EncoderSettings{}};
}

namespace {

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void no_flush(png_structp) {}

// Kept free of objects with non-trivial destructors: libpng reports errors by
// longjmp back into this frame.
bool encode_into(const Image& img, const EncoderSettings& s, std::vector<std::uint8_t>& out,
                 std::vector<png_bytep>& rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) {
        return false;
    }
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_set_write_fn(png, &out, append_bytes, no_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, s.compression_level);
    png_set_compression_mem_level(png, s.mem_level);
    png_set_compression_window_bits(png, s.window_bits);
    png_set_compression_strategy(png, s.strategy);
    png_set_filter(png, PNG_FILTER_TYPE_BASE, s.adaptive_filters ? PNG_ALL_FILTERS : PNG_FILTER_NONE);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& img, const EncoderSettings& settings) {
    if (img.height <= 0 || img.width <= 0 || img.pixels.size() != static_cast<std::size_t>(img.height) * img.width * 3) {
        throw EncodeFailure("image buffer does not match its dimensions");
    }
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) {
        // libpng only reads through these pointers when writing.
        rows[y] = const_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3);
    }
    std::vector<std::uint8_t> out;
    out.reserve(img.pixels.size() / 2 + 1024);
    if (!encode_into(img, settings, out, rows)) {
        throw EncodeFailure("libpng failed to encode a " + std::to_string(img.height) + "x" +
                            std::to_string(img.width) + " image");
    }
    return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()) == 0) {
        throw FormatError(std::string("not a readable PNG: ") + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    if (image.width == 0 || image.height == 0 || image.width > (1u << 16) || image.height > (1u << 16)) {
        png_image_free(&image);
        throw FormatError("implausible PNG dimensions");
    }
    Image out(static_cast<int>(image.height), static_cast<int>(image.width));
    if (png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr) == 0) {
        const std::string message = image.message;
        png_image_free(&image);
        throw FormatError("PNG decode failed: " + message);
    }
    return out;
}

void write_png(const std::filesystem::path& path, const Image& img) {
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("cannot write " + path.string());
    }
}

Image read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

}  // namespace flf
