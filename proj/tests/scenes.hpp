#pragma once

// Randomized cameras, drop sets and depth maps for property tests.

#include "rainforge/camera.hpp"
#include "rainforge/particles.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace scenes {

inline rainforge::CameraSettings random_camera(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    rainforge::CameraSettings s;
    s.focal_length_mm = 15.0 + 60.0 * unit(gen);
    s.sensor_width_mm = 36.0;
    s.image_width_px = 64 + static_cast<int>(400 * unit(gen));
    s.image_height_px = 48 + static_cast<int>(300 * unit(gen));
    s.exposure_s = 1.0 / (30.0 + 200.0 * unit(gen));
    s.near_m = 0.05 + 0.5 * unit(gen);
    s.far_m = 5.0 + 40.0 * unit(gen);
    const rainforge::vec3 pos{10 * unit(gen) - 5, 3 * unit(gen), 10 * unit(gen) - 5};
    s.pose = rainforge::pose_from_euler(pos, 360 * unit(gen), 40 * unit(gen) - 20, 20 * unit(gen) - 10);
    return s;
}

// Drops scattered through and around the frustum, some far outside it.
inline std::vector<rainforge::Raindrop> random_drops(const rainforge::CameraModel& cam, std::size_t n,
                                                     std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    const auto box = rainforge::frustum_bounds(cam, 2.0);
    const rainforge::vec3 lo = box.min_corner(), ext = box.extent();
    const rainforge::WindVector wind{12 * unit(gen) - 6, 12 * unit(gen) - 6};
    std::vector<rainforge::Raindrop> drops(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& d = drops[i];
        d.id = i;
        d.diameter = (0.5 + 4.5 * unit(gen)) * 1e-3;
        if (unit(gen) < 0.05)
            d.position = {1e4 * (unit(gen) - 0.5), 1e3 * unit(gen), 1e4 * (unit(gen) - 0.5)};
        else
            d.position = {lo.x + ext.x * unit(gen), lo.y + ext.y * unit(gen), lo.z + ext.z * unit(gen)};
        d.velocity = rainforge::drop_velocity(d.diameter, wind);
    }
    return drops;
}

// One of: a depth ramp, tilted planes with sky above a horizon, or random blocks.
inline std::vector<float> random_depth(const rainforge::CameraModel& cam, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit{0.0, 1.0};
    const int w = cam.width(), h = cam.height();
    const double far = cam.far_m();
    std::vector<float> depth(static_cast<std::size_t>(w) * h);
    const int kind = static_cast<int>(3 * unit(gen));
    const double a = 0.3 + far * unit(gen), gx = far * (unit(gen) - 0.5) / w, gy = far * unit(gen) / h;
    const int horizon = static_cast<int>(h * unit(gen));
    std::vector<double> blocks(64);
    for (double& b : blocks) b = unit(gen) < 0.2 ? INFINITY : 0.2 + 1.5 * far * unit(gen);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double d;
            if (kind == 0)
                d = a + gx * x + gy * y;
            else if (kind == 1)
                d = y < horizon ? INFINITY : a + gy * (h - y) * 3;
            else
                d = blocks[(y * 8 / h) * 8 + x * 8 / w];
            depth[static_cast<std::size_t>(y) * w + x] = static_cast<float>(std::max(d, 0.05));
        }
    return depth;
}

}  // namespace scenes
