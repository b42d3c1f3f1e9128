#pragma once

// Procedural street scene (road, two building rows, sky) with an exactly
// matching metric depth map, for demos and tests.

#include "rainforge/camera.hpp"
#include "rainforge/composite.hpp"

#include <filesystem>
#include <vector>

namespace rainforge {

struct SyntheticScene {
    RgbImage background;      // sRGB-encoded values
    std::vector<float> depth;  // meters along the view axis, +inf for sky
    int width = 0, height = 0;
};

// Camera 1.5 m above the road looking along -z, 40 mm lens on a 36 mm sensor.
CameraSettings synthetic_camera(int width, int height, double far_m = 20.0);

SyntheticScene make_street_scene(int width, int height);

// Writes background.png (8-bit sRGB) and depth.pfm into `dir`.
void write_street_scene(const std::filesystem::path& dir, int width, int height);

}  // namespace rainforge
