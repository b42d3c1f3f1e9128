#pragma once

// Exposure-time blending of a rain layer over a background image:
//
//   out(x) = (T - a(x) t1(x)) / T * I(x) + S(x) * t1(x) / t0
//
// T exposure, a and S the layer's alpha and (premultiplied) color, t1 the
// layer's per-pixel dwell time and t0 the dwell time baked into the
// reference streak database.

#include "rainforge/rain_layer.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace rainforge {

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // interleaved RGB, row 0 at the top

    RgbImage() = default;
    RgbImage(int w, int h, float fill = 0.0f)
        : width{w}, height{h}, pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

    float& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c]; }
    float at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    // Every channel finite and in [0, 1].
    bool in_unit_range() const;
};

enum class Transfer { srgb, linear };

// IEC 61966-2-1 piecewise curves.
double srgb_to_linear(double encoded);
double linear_to_srgb(double linear);

RgbImage linearize(const RgbImage& img, Transfer transfer);
RgbImage delinearize(const RgbImage& img, Transfer transfer);

// sqrt(1e-3) / 50 seconds.
inline const double reference_tau0_s = std::sqrt(1e-3) / 50.0;

struct BlendParams {
    double exposure_s = 1.0 / 60.0;
    double tau0_s = reference_tau0_s;
};

// Throws dimension_error when sizes differ and validation_error for
// non-positive exposure or tau0. Output is clamped to [0, 1]; pixels with zero
// alpha are copied from the background unchanged.
RgbImage blend(const RgbImage& background, const RainLayer& layer, const BlendParams& params,
               unsigned threads = 1);

// Same formula without the final clamp.
RgbImage blend_hdr(const RgbImage& background, const RainLayer& layer, const BlendParams& params,
                   unsigned threads = 1);

}  // namespace rainforge
