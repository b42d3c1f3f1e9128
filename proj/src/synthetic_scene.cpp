#include "rainforge/synthetic_scene.hpp"

#include "rainforge/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rainforge {

CameraSettings synthetic_camera(int width, int height, double far_m) {
    CameraSettings s;
    s.focal_length_mm = 40.0;
    s.sensor_width_mm = 36.0;
    s.image_width_px = width;
    s.image_height_px = height;
    s.pose = pose_from_euler({0.0, 1.5, 0.0}, 0.0, 0.0, 0.0);
    s.far_m = far_m;
    return s;
}

SyntheticScene make_street_scene(int width, int height) {
    constexpr double camera_height = 1.5;
    constexpr double street_half_width = 7.0;
    constexpr double building_height = 18.0;
    constexpr double street_end = 120.0;

    SyntheticScene scene;
    scene.width = width;
    scene.height = height;
    scene.background = RgbImage{width, height};
    scene.depth.assign(static_cast<std::size_t>(width) * height, std::numeric_limits<float>::infinity());
    const double fx = 40.0 / 36.0 * width;
    const double cx = 0.5 * width, cy = 0.5 * height;

    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            // Camera-space ray with z = 1; +y points down.
            const double rx = (x + 0.5 - cx) / fx, ry = (y + 0.5 - cy) / fx;
            double depth = INFINITY;
            double rgb[3] = {0.45 + 0.25 * (double(y) / height), 0.6 + 0.2 * (double(y) / height), 0.85};

            if (ry > 0.0) {  // road
                const double z = camera_height / ry;
                if (z < street_end) {
                    depth = z;
                    const double wx = rx * z;
                    const bool stripe = std::fabs(wx) < 0.08 && std::fmod(z, 6.0) < 3.0;
                    const double g = stripe ? 0.85 : 0.22 + 0.03 * std::sin(wx * 3.1 + z * 1.7);
                    rgb[0] = rgb[1] = g;
                    rgb[2] = g * (stripe ? 0.7 : 1.05);
                }
            }
            if (rx != 0.0) {  // building facades at x = +-street_half_width
                const double z = street_half_width / std::fabs(rx);
                const double wy = camera_height - ry * z;  // world height of the hit
                if (z < depth && z < street_end && wy >= 0.0 && wy <= building_height) {
                    depth = z;
                    const bool window = std::fmod(wy, 3.0) > 1.2 && std::fmod(z, 4.0) > 1.5;
                    const double base = rx < 0 ? 0.55 : 0.48;
                    rgb[0] = window ? 0.15 : base;
                    rgb[1] = window ? 0.2 : base * 0.8;
                    rgb[2] = window ? 0.3 : base * 0.65;
                }
            }
            if (!std::isfinite(depth) && std::fabs(rx) * street_end < street_half_width) {
                const double wy = camera_height - ry * street_end;  // end wall
                if (wy >= 0.0 && wy <= building_height) {
                    depth = street_end;
                    rgb[0] = 0.4;
                    rgb[1] = 0.38;
                    rgb[2] = 0.36;
                }
            }
            for (int c = 0; c < 3; ++c) scene.background.at(x, y, c) = static_cast<float>(std::clamp(rgb[c], 0.0, 1.0));
            scene.depth[static_cast<std::size_t>(y) * width + x] = static_cast<float>(depth);
        }
    return scene;
}

void write_street_scene(const std::filesystem::path& dir, int width, int height) {
    const SyntheticScene scene = make_street_scene(width, height);
    std::filesystem::create_directories(dir);
    PngImage png{width, height, 3, 8, {}};
    png.samples.reserve(scene.background.pixels.size());
    for (float v : scene.background.pixels)
        png.samples.push_back(static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0)));
    write_png(dir / "background.png", png);
    write_pfm(dir / "depth.pfm", {width, height, 1, scene.depth});
}

}  // namespace rainforge
