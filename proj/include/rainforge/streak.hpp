#pragma once

// Streak rasterization: every visible drop becomes a motion-blurred thick line
// in a RainLayer.
//
// A streak is the rectangle swept by the projected drop disc: it runs from p0
// to p1, extended by half its width at both ends, and is `width_px` wide.
// Widths below one pixel are drawn one pixel wide with opacity scaled by the
// width, which keeps the deposited alpha proportional to the true footprint.
// Pixel coverage is the exact area of the pixel square inside the rectangle,
// optionally weighted by a gaussian cross-section.

#include "rainforge/camera.hpp"
#include "rainforge/particles.hpp"
#include "rainforge/rain_layer.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace rainforge {

struct StreakSegment {
    ImagePoint p0, p1;  // projected drop center over the exposure, after clipping
    double width_px = 0;
    double depth_m = 0;    // camera depth of the midpoint; front-to-back sort key
    double time_span = 1;  // fraction of the exposure covered by [p0, p1]
    std::uint64_t drop_id = 0;

    double length_px() const { return std::hypot(p1.u - p0.u, p1.v - p0.v); }
};

// Projects the drop's swept segment, clipping it to the near plane and to the
// image rectangle. Throws internal_error when the drop never gets in front of
// the near plane.
StreakSegment streak_segment(const CameraModel& cam, const Raindrop& drop);

// Dwell time per pixel: exposure * time_span / max(length_px, 1).
double per_pixel_tau1(const StreakSegment& segment, double exposure_s);

enum class CrossSection { gaussian, flat };

struct ProceduralStreak {
    CrossSection profile = CrossSection::gaussian;
    // Gaussian sigma as a fraction of the streak half-width.
    double sigma_factor = 0.5;
    // Drop radiance relative to a white surface. The layer stores it scaled by
    // reference_tau0_s / exposure so blending yields a time-weighted average.
    double intensity = 1.0;
    double opacity = 1.0;
};

struct AtlasEntry {
    double length_px = 0;  // metadata of the source streak
    double width_px = 0;
    int tex_width = 0;
    int tex_height = 0;       // texture rows run along the streak
    std::vector<float> gray;  // [0, 1], row-major
    std::vector<float> alpha;
};

struct StreakAtlas {
    std::vector<AtlasEntry> entries;
};

// Reads <dir>/index.json: {"entries": [{"texture_path", "length_px",
// "width_px"}, ...]} with 8- or 16-bit gray+alpha (or RGBA) PNG textures.
StreakAtlas load_streak_atlas(const std::filesystem::path& dir);

struct StreakAppearance {
    enum class Mode { procedural, database } mode = Mode::procedural;
    ProceduralStreak procedural;
    std::shared_ptr<const StreakAtlas> atlas;
    double gain = 1.0;  // scales atlas intensities
    double opacity = 1.0;

    // Throws config_error for an empty atlas in database mode and
    // validation_error for out-of-range parameters.
    void validate() const;
};

// Gaussian streaks narrower than this are drawn flat with the same total mass.
inline constexpr double gaussian_min_width_px = 2.0;

struct RasterOptions {
    const DepthMap* depth = nullptr;  // per-pixel occlusion test when set
    double occlusion_epsilon_m = default_occlusion_epsilon_m;
    int band_rows = 64;
    unsigned threads = 1;
};

// Stamps every segment into the layer. Segments are composited front to back
// (by depth_m, then drop_id) with OVER, so the result is independent of input
// order, band size and thread count.
RainLayer rasterize(RainLayer layer, std::span<const StreakSegment> segments,
                    const StreakAppearance& appearance, std::uint64_t rng_seed,
                    double exposure_s, const RasterOptions& options = {});

// Pixels with nonzero box-filter coverage by the streak rectangle, with their
// covered area.
struct PixelCoverage {
    int x, y;
    double area;
};
std::vector<PixelCoverage> streak_footprint(const StreakSegment& segment, int width, int height);

}  // namespace rainforge
