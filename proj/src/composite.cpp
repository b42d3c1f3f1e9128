#include "rainforge/composite.hpp"

#include "rainforge/errors.hpp"
#include "rainforge/parallel.hpp"

#include <algorithm>
#include <string>

namespace rainforge {

double RainLayer::coverage() const {
    if (alpha.empty()) return 0.0;
    const auto n = std::count_if(alpha.begin(), alpha.end(), [](float a) { return a > 0.0f; });
    return static_cast<double>(n) / static_cast<double>(alpha.size());
}

double RainLayer::alpha_mass() const {
    double sum = 0;
    for (float a : alpha) sum += a;
    return sum;
}

bool RainLayer::invariants_hold(double max_tau1) const {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (!(alpha[i] >= 0.0f && alpha[i] <= 1.0f)) return false;
        if ((alpha[i] == 0.0f) != (tau1[i] == 0.0f)) return false;
        if (!(tau1[i] >= 0.0f) || tau1[i] > max_tau1) return false;
    }
    return true;
}

bool RgbImage::in_unit_range() const {
    return std::all_of(pixels.begin(), pixels.end(),
                       [](float v) { return std::isfinite(v) && v >= 0.0f && v <= 1.0f; });
}

double srgb_to_linear(double e) {
    if (e <= 0.04045) return e / 12.92;
    return std::pow((e + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double l) {
    if (l <= 0.0031308) return 12.92 * l;
    return 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}

namespace {

template <typename Fn>
RgbImage map_channels(const RgbImage& img, Fn&& fn) {
    RgbImage out = img;
    for (float& v : out.pixels) v = static_cast<float>(fn(static_cast<double>(v)));
    return out;
}

template <bool Clamp>
RgbImage blend_impl(const RgbImage& bg, const RainLayer& layer, const BlendParams& params,
                    unsigned threads) {
    if (bg.width != layer.width || bg.height != layer.height)
        throw dimension_error("background is " + std::to_string(bg.width) + "x" +
                              std::to_string(bg.height) + " but rain layer is " +
                              std::to_string(layer.width) + "x" + std::to_string(layer.height));
    if (!(params.exposure_s > 0.0) || !(params.tau0_s > 0.0))
        throw validation_error("blend: exposure and tau0 must be positive");

    const double exposure = params.exposure_s;
    const double tau0 = params.tau0_s;
    RgbImage out = bg;
    constexpr int rows_per_tile = 32;
    const int tiles = (bg.height + rows_per_tile - 1) / rows_per_tile;
    parallel_for(static_cast<std::size_t>(tiles), threads, [&](std::size_t tile) {
        const std::size_t begin = tile * rows_per_tile * static_cast<std::size_t>(bg.width);
        const std::size_t end =
            std::min<std::size_t>((tile + 1) * rows_per_tile, bg.height) * static_cast<std::size_t>(bg.width);
        const float* alpha = layer.alpha.data();
        const float* tau1 = layer.tau1.data();
        const float* rain = layer.color.data();
        float* dst = out.pixels.data();
        for (std::size_t i = begin; i < end; ++i) {
            const double a = alpha[i];
            if (a == 0.0) continue;
            const double t1 = tau1[i];
            const double keep = (exposure - a * t1) / exposure;
            const double gain = t1 / tau0;
            for (int c = 0; c < 3; ++c) {
                double v = keep * static_cast<double>(dst[3 * i + c]) + static_cast<double>(rain[3 * i + c]) * gain;
                if constexpr (Clamp) v = std::clamp(v, 0.0, 1.0);
                dst[3 * i + c] = static_cast<float>(v);
            }
        }
    });
    return out;
}

}  // namespace

RgbImage linearize(const RgbImage& img, Transfer transfer) {
    if (transfer == Transfer::linear) return img;
    return map_channels(img, srgb_to_linear);
}

RgbImage delinearize(const RgbImage& img, Transfer transfer) {
    if (transfer == Transfer::linear) return img;
    return map_channels(img, linear_to_srgb);
}

RgbImage blend(const RgbImage& background, const RainLayer& layer, const BlendParams& params,
               unsigned threads) {
    return blend_impl<true>(background, layer, params, threads);
}

RgbImage blend_hdr(const RgbImage& background, const RainLayer& layer, const BlendParams& params,
                   unsigned threads) {
    return blend_impl<false>(background, layer, params, threads);
}

}  // namespace rainforge
