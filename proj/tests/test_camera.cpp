#include "oracles.hpp"
#include "scenes.hpp"

#include "rainforge/camera.hpp"
#include "rainforge/errors.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace rainforge;

namespace {

// fx = 2000 px, 2000x1000 image, looking along world -z from the origin.
CameraSettings level_camera() {
    CameraSettings s;
    s.focal_length_mm = 36.0;
    s.sensor_width_mm = 36.0;
    s.image_width_px = 2000;
    s.image_height_px = 1000;
    s.pose = pose_from_euler({0, 0, 0}, 0, 0, 0);
    return s;
}

Raindrop still_drop(vec3 p, double d = 2e-3) {
    Raindrop r;
    r.position = p;
    r.diameter = d;
    r.velocity = drop_velocity(d, WindVector{});
    return r;
}

std::vector<std::uint64_t> ids(const std::vector<Raindrop>& v) {
    std::vector<std::uint64_t> out;
    for (const auto& d : v) out.push_back(d.id);
    return out;
}

}  // namespace

TEST(Pose, AxesAndInverse) {
    const auto pose = pose_from_euler({1, 2, 3}, 30, -10, 5);
    const CameraSettings s = [&] {
        auto c = level_camera();
        c.pose = pose;
        return c;
    }();
    const CameraModel cam{s};
    const vec3 p{4, -1, 7};
    const vec3 back = cam.to_world(cam.to_camera(p));
    EXPECT_NEAR(back.x, p.x, 1e-12);
    EXPECT_NEAR(back.y, p.y, 1e-12);
    EXPECT_NEAR(back.z, p.z, 1e-12);
    EXPECT_NEAR(length(cam.position() - vec3{1, 2, 3}), 0.0, 1e-12);

    const CameraModel level{level_camera()};
    EXPECT_NEAR(length(level.forward() - vec3{0, 0, -1}), 0.0, 1e-15);
    // World up maps to image up (camera -y).
    EXPECT_LT(level.to_camera({0, 1, -5}).y, 0.0);
    const CameraModel yawed{[] {
        auto c = level_camera();
        c.pose = pose_from_euler({}, 90, 0, 0);
        return c;
    }()};
    EXPECT_NEAR(length(yawed.forward() - vec3{-1, 0, 0}), 0.0, 1e-12);
}

TEST(Project, Examples) {
    const CameraModel cam{level_camera()};
    EXPECT_DOUBLE_EQ(cam.fx(), 2000.0);
    const auto axis = project(cam, {0, 0, -7});
    ASSERT_TRUE(axis);
    EXPECT_DOUBLE_EQ(axis->u, 1000.0);
    EXPECT_DOUBLE_EQ(axis->v, 500.0);
    EXPECT_DOUBLE_EQ(axis->z_cam, 7.0);
    EXPECT_FALSE(project(cam, {0, 0, 3}));
    EXPECT_FALSE(project(cam, {0, 0, -0.05}));
    const auto off = project(cam, {0.5, 0, -10});
    ASSERT_TRUE(off);
    EXPECT_DOUBLE_EQ(off->u, 1000.0 + 2000.0 * 0.5 / 10.0);
    const auto up = project(cam, {0, 0.25, -10});
    EXPECT_DOUBLE_EQ(up->v, 500.0 - 50.0);
}

TEST(CameraModel, RejectsBadSettings) {
    auto s = level_camera();
    s.focal_length_mm = 0.5;
    EXPECT_THROW(CameraModel{s}, validation_error);
    s = level_camera();
    s.image_width_px = 0;
    EXPECT_THROW(CameraModel{s}, validation_error);
    s = level_camera();
    s.near_m = 30;
    EXPECT_THROW(CameraModel{s}, validation_error);
    s = level_camera();
    s.exposure_s = 0;
    EXPECT_THROW(CameraModel{s}, validation_error);
}

TEST(FrustumCull, Examples) {
    const CameraModel cam{level_camera()};
    EXPECT_TRUE(in_frustum(cam, still_drop({0, 0, -10})));
    EXPECT_FALSE(in_frustum(cam, still_drop({0, 0, 1e4})));
    EXPECT_FALSE(in_frustum(cam, still_drop({0, 0, -25})));
    EXPECT_FALSE(in_frustum(cam, still_drop({50, 0, -10})));
    // Above the top edge at exposure start, inside by the end.
    const double top = 500.0 * 10.0 / 2000.0;
    Raindrop fast = still_drop({0, top + 0.01, -10});
    fast.velocity = {0, -60, 0};
    EXPECT_TRUE(in_frustum(cam, fast));
    EXPECT_FALSE(in_frustum(cam, still_drop({0, top + 0.5, -10})));
}

TEST(FrustumCull, MatchesBruteForceOnRandomScenes) {
    std::mt19937_64 gen{1234};
    for (int scene = 0; scene < 20; ++scene) {
        const CameraModel cam{scenes::random_camera(gen)};
        const auto drops = scenes::random_drops(cam, 5000, gen);
        std::vector<std::uint64_t> expect;
        for (const auto& d : drops)
            if (oracle::frustum_oracle(cam, d)) expect.push_back(d.id);
        EXPECT_EQ(ids(frustum_cull(cam, drops)), expect) << "scene " << scene;
    }
}

TEST(FrustumCull, IdempotentOrderPreservingPermutationInvariant) {
    std::mt19937_64 gen{77};
    const CameraModel cam{scenes::random_camera(gen)};
    auto drops = scenes::random_drops(cam, 4000, gen);
    const auto once = frustum_cull(cam, drops);
    EXPECT_EQ(ids(frustum_cull(cam, once)), ids(once));
    EXPECT_TRUE(std::is_sorted(once.begin(), once.end(),
                               [](const Raindrop& a, const Raindrop& b) { return a.id < b.id; }));
    std::shuffle(drops.begin(), drops.end(), gen);
    auto shuffled = ids(frustum_cull(cam, drops));
    std::sort(shuffled.begin(), shuffled.end());
    EXPECT_EQ(shuffled, ids(once));
}

TEST(FrustumCull, KeptDropsTouchTheImage) {
    std::mt19937_64 gen{5};
    for (int scene = 0; scene < 5; ++scene) {
        const CameraModel cam{scenes::random_camera(gen)};
        for (const auto& d : frustum_cull(cam, scenes::random_drops(cam, 3000, gen))) {
            bool touches = false;
            for (int k = 0; k <= 32 && !touches; ++k) {
                const auto p = project(cam, d.position_at(cam.exposure_s() * k / 32.0));
                if (!p || p->z_cam >= cam.far_m()) continue;
                const double r = cam.fx() * 0.5 * d.diameter / p->z_cam;
                touches = p->u >= -r && p->u <= cam.width() + r && p->v >= -r && p->v <= cam.height() + r;
            }
            ASSERT_TRUE(touches) << d.id;
        }
    }
}

TEST(OcclusionCull, Examples) {
    const auto s = level_camera();
    const CameraModel cam{s};
    const DepthMap near_wall{s.image_width_px, s.image_height_px,
                             std::vector<float>(std::size_t(2000) * 1000, 5.0f), s.far_m};
    const DepthMap far_wall{s.image_width_px, s.image_height_px,
                            std::vector<float>(std::size_t(2000) * 1000, 10.0f), s.far_m};
    EXPECT_FALSE(unoccluded(cam, near_wall, still_drop({0, 0, -10})));
    EXPECT_TRUE(unoccluded(cam, far_wall, still_drop({0, 0, -5})));
    // Within the tolerance of the surface.
    EXPECT_FALSE(unoccluded(cam, far_wall, still_drop({0, 0, -9.97})));
    const DepthMap sky{s.image_width_px, s.image_height_px,
                       std::vector<float>(std::size_t(2000) * 1000, INFINITY), s.far_m};
    EXPECT_TRUE(unoccluded(cam, sky, still_drop({0, 0, -19})));
}

TEST(OcclusionCull, DimensionMismatch) {
    const CameraModel cam{level_camera()};
    const DepthMap small{10, 10, std::vector<float>(100, 1.0f), 20.0};
    const std::vector<Raindrop> none;
    EXPECT_THROW(occlusion_cull(cam, small, none), dimension_error);
    EXPECT_THROW(occlusion_cull(cam, small, none), config_error);
}

TEST(OcclusionCull, MatchesDirectLookupOnRandomScenes) {
    std::mt19937_64 gen{4321};
    for (int scene = 0; scene < 20; ++scene) {
        const CameraModel cam{scenes::random_camera(gen)};
        const auto raw = scenes::random_depth(cam, gen);
        const DepthMap depth{cam.width(), cam.height(), raw, cam.far_m()};
        const auto drops = frustum_cull(cam, scenes::random_drops(cam, 5000, gen));
        std::vector<std::uint64_t> expect;
        for (const auto& d : drops)
            if (oracle::occlusion_oracle(cam, raw, d, default_occlusion_epsilon_m)) expect.push_back(d.id);
        const auto kept = occlusion_cull(cam, depth, drops);
        EXPECT_EQ(ids(kept), expect) << "scene " << scene;
        EXPECT_EQ(ids(occlusion_cull(cam, depth, kept)), ids(kept));
    }
}

TEST(DepthMap, Validation) {
    EXPECT_THROW(DepthMap(2, 2, {1, 1, 1}, 20), validation_error);
    EXPECT_THROW(DepthMap(2, 2, {1, 1, 0, 1}, 20), validation_error);
    EXPECT_THROW(DepthMap(2, 2, {1, 1, NAN, 1}, 20), validation_error);
    const DepthMap d{2, 1, {5, 30}, 20};
    EXPECT_EQ(d.at(0, 0), 5.0f);
    EXPECT_TRUE(DepthMap::is_sky(d.at(1, 0)));
}

TEST(FrustumBounds, ContainsFrustumPoints) {
    std::mt19937_64 gen{8};
    std::uniform_real_distribution<double> unit{0, 1};
    for (int k = 0; k < 10; ++k) {
        const CameraModel cam{scenes::random_camera(gen)};
        const auto box = frustum_bounds(cam, 0.0);
        for (int i = 0; i < 200; ++i) {
            const double z = cam.near_m() + (cam.far_m() - cam.near_m()) * unit(gen);
            const vec3 pc{(unit(gen) * cam.width() - cam.cx()) * z / cam.fx(),
                          (unit(gen) * cam.height() - cam.cy()) * z / cam.fy(), z};
            const vec3 w = cam.to_world(pc);
            const vec3 lo = box.min_corner() - vec3{1e-9, 1e-9, 1e-9};
            const vec3 hi = box.max_corner() + vec3{1e-9, 1e-9, 1e-9};
            ASSERT_TRUE(w.x >= lo.x && w.x <= hi.x && w.y >= lo.y && w.y <= hi.y && w.z >= lo.z && w.z <= hi.z);
        }
    }
}
