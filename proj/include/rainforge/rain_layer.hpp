#pragma once

#include <cstddef>
#include <vector>

namespace rainforge {

// Image-space accumulation of rain streaks.
//   color: RGB premultiplied by coverage, linear light
//   alpha: coverage in [0, 1]
//   tau1:  per-pixel dwell time in seconds of the frontmost streak, 0 where
//          alpha is 0
struct RainLayer {
    int width = 0;
    int height = 0;
    std::vector<float> color;  // 3 per pixel
    std::vector<float> alpha;
    std::vector<float> tau1;

    RainLayer() = default;
    RainLayer(int w, int h)
        : width{w},
          height{h},
          color(static_cast<std::size_t>(w) * h * 3, 0.0f),
          alpha(static_cast<std::size_t>(w) * h, 0.0f),
          tau1(static_cast<std::size_t>(w) * h, 0.0f) {}

    std::size_t pixel_count() const { return alpha.size(); }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }

    // Fraction of pixels with alpha > 0.
    double coverage() const;
    // Sum of alpha over all pixels.
    double alpha_mass() const;
    // alpha == 0 <=> tau1 == 0, 0 <= alpha <= 1, tau1 <= max_tau1.
    bool invariants_hold(double max_tau1) const;
};

}  // namespace rainforge
