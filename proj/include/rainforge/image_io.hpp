#pragma once

// PNG (8/16-bit, gray/gray+alpha/RGB/RGBA) and PFM (Portable FloatMap) codecs.
// Both hold samples row-major with row 0 at the top of the image.

#include <cstdint>
#include <filesystem>
#include <vector>

namespace rainforge {

struct PngImage {
    int width = 0;
    int height = 0;
    int channels = 0;   // 1 gray, 2 gray+alpha, 3 RGB, 4 RGBA
    int bit_depth = 8;  // 8 or 16
    std::vector<std::uint16_t> samples;

    int max_value() const { return bit_depth == 16 ? 65535 : 255; }
    std::uint16_t at(int x, int y, int c) const {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
};

// Palette and low-bit-depth files are expanded to 8-bit. Throws io_error when
// the file cannot be opened and decode_error for malformed content.
PngImage read_png(const std::filesystem::path& path);

// Output bytes depend only on the image content.
void write_png(const std::filesystem::path& path, const PngImage& img);

struct PfmImage {
    int width = 0;
    int height = 0;
    int channels = 0;  // 1 ("Pf") or 3 ("PF")
    std::vector<float> data;
};

// Accepts either byte order. Rows are flipped so row 0 is the top.
PfmImage read_pfm(const std::filesystem::path& path);

// Always writes little-endian (scale -1).
void write_pfm(const std::filesystem::path& path, const PfmImage& img);

}  // namespace rainforge
