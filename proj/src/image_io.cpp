#include "rainforge/image_io.hpp"

#include "rainforge/errors.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace rainforge {

namespace {

struct file_closer {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using file_ptr = std::unique_ptr<std::FILE, file_closer>;

file_ptr open_file(const std::filesystem::path& path, const char* mode) {
    file_ptr f{std::fopen(path.c_str(), mode)};
    if (!f) throw io_error("cannot open " + path.string() + ": " + std::strerror(errno));
    return f;
}

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
    auto* what = static_cast<std::string*>(png_get_error_ptr(png));
    *what = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
    auto file = open_file(path, "rb");
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw decode_error(path.string() + " is not a PNG file");

    std::string what;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &what, png_error_fn, png_warning_fn);
    if (!png) throw internal_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    PngImage img;
    std::vector<png_bytep> rows;
    std::vector<unsigned char> raw;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw decode_error("cannot decode " + path.string() + ": " + what);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = png_get_channels(png, info);
    img.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.resize(rowbytes * img.height);
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y) rows[y] = raw.data() + rowbytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
    img.samples.resize(n);
    if (img.bit_depth == 16) {
        for (int y = 0; y < img.height; ++y) {
            const auto* src = reinterpret_cast<const std::uint16_t*>(rows[y]);
            std::memcpy(&img.samples[static_cast<std::size_t>(y) * img.width * img.channels], src,
                        sizeof(std::uint16_t) * img.width * img.channels);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t y = i / (static_cast<std::size_t>(img.width) * img.channels);
            const std::size_t off = i % (static_cast<std::size_t>(img.width) * img.channels);
            img.samples[i] = rows[y][off];
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const PngImage& img) {
    if (img.width <= 0 || img.height <= 0 || img.channels < 1 || img.channels > 4)
        throw internal_error("write_png: invalid image shape");
    if (img.bit_depth != 8 && img.bit_depth != 16) throw internal_error("write_png: bit depth must be 8 or 16");
    if (img.samples.size() != static_cast<std::size_t>(img.width) * img.height * img.channels)
        throw internal_error("write_png: sample buffer size mismatch");

    auto file = open_file(path, "wb");
    static constexpr int color_types[] = {PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA,
                                          PNG_COLOR_TYPE_RGB, PNG_COLOR_TYPE_RGB_ALPHA};
    std::string what;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &what, png_error_fn, png_warning_fn);
    if (!png) throw internal_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);

    const std::size_t row_samples = static_cast<std::size_t>(img.width) * img.channels;
    const std::size_t bytes_per_sample = img.bit_depth / 8;
    std::vector<unsigned char> raw(row_samples * bytes_per_sample * img.height);
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
        if (img.bit_depth == 16) {
            raw[2 * i] = static_cast<unsigned char>(img.samples[i] >> 8);
            raw[2 * i + 1] = static_cast<unsigned char>(img.samples[i] & 0xff);
        } else {
            raw[i] = static_cast<unsigned char>(img.samples[i]);
        }
    }
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) rows[y] = raw.data() + row_samples * bytes_per_sample * y;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("cannot write " + path.string() + ": " + what);
    }
    png_init_io(png, file.get());
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, img.width, img.height, img.bit_depth, color_types[img.channels - 1],
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    if (std::fflush(file.get()) != 0) throw io_error("cannot write " + path.string());
}

PfmImage read_pfm(const std::filesystem::path& path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw io_error("cannot open " + path.string());
    std::string magic;
    in >> magic;
    PfmImage img;
    if (magic == "PF")
        img.channels = 3;
    else if (magic == "Pf")
        img.channels = 1;
    else
        throw decode_error(path.string() + " is not a PFM file");
    double scale = 0;
    in >> img.width >> img.height >> scale;
    if (!in || img.width <= 0 || img.height <= 0 || scale == 0.0 || !std::isfinite(scale))
        throw decode_error("malformed PFM header in " + path.string());
    in.get();  // single whitespace byte before the raster
    const std::size_t row = static_cast<std::size_t>(img.width) * img.channels;
    img.data.resize(row * img.height);
    std::vector<float> tmp(img.data.size());
    in.read(reinterpret_cast<char*>(tmp.data()), static_cast<std::streamsize>(tmp.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != tmp.size() * sizeof(float))
        throw decode_error("truncated PFM raster in " + path.string());
    const bool file_little = scale < 0;
    if (file_little != (std::endian::native == std::endian::little))
        for (float& f : tmp) f = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(f)));
    // PFM stores the bottom row first.
    for (int y = 0; y < img.height; ++y)
        std::memcpy(&img.data[row * (img.height - 1 - y)], &tmp[row * y], row * sizeof(float));
    return img;
}

void write_pfm(const std::filesystem::path& path, const PfmImage& img) {
    if (img.channels != 1 && img.channels != 3) throw internal_error("write_pfm: channels must be 1 or 3");
    const std::size_t row = static_cast<std::size_t>(img.width) * img.channels;
    if (img.data.size() != row * img.height) throw internal_error("write_pfm: buffer size mismatch");
    std::ofstream out{path, std::ios::binary};
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out << (img.channels == 3 ? "PF" : "Pf") << '\n' << img.width << ' ' << img.height << '\n' << "-1.0\n";
    for (int y = img.height - 1; y >= 0; --y) {
        if constexpr (std::endian::native == std::endian::little) {
            out.write(reinterpret_cast<const char*>(&img.data[row * y]),
                      static_cast<std::streamsize>(row * sizeof(float)));
        } else {
            for (std::size_t i = 0; i < row; ++i) {
                const auto v = __builtin_bswap32(std::bit_cast<std::uint32_t>(img.data[row * y + i]));
                out.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
        }
    }
    if (!out) throw io_error("cannot write " + path.string());
}

}  // namespace rainforge
