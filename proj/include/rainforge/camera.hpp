#pragma once

// Pinhole camera, world -> image projection and the two visibility culls
// (frustum, then depth occlusion) applied to spawned drops.
//
// Camera space follows the usual computer-vision layout: +x right, +y down,
// +z along the view axis. Pixel (i, j) covers [i, i+1) x [j, j+1); the
// principal point sits at the image center (W/2, H/2).

#include "rainforge/particles.hpp"
#include "rainforge/vec.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace rainforge {

// World -> camera rigid transform: p_cam = rotation * p_world + translation.
struct RigidTransform {
    mat3 rotation;
    vec3 translation;

    vec3 apply(const vec3& p) const { return rotation * p + translation; }
    vec3 apply_inverse(const vec3& p) const { return rotation.transposed() * (p - translation); }
};

// Pose for a camera at `position` (world, meters). With all angles zero the
// camera looks along world -z with +y up. Yaw turns about world +y, pitch
// tilts the view up, roll spins about the view axis; all in degrees.
RigidTransform pose_from_euler(const vec3& position, double yaw_deg, double pitch_deg,
                               double roll_deg);

struct CameraSettings {
    double focal_length_mm = 40.0;
    double sensor_width_mm = 36.0;
    int image_width_px = 0;
    int image_height_px = 0;
    RigidTransform pose;
    double exposure_s = 1.0 / 60.0;
    double near_m = 0.1;
    double far_m = 20.0;
};

class CameraModel {
  public:
    // Throws validation_error for out-of-band settings.
    explicit CameraModel(const CameraSettings& s);

    const CameraSettings& settings() const { return s_; }
    int width() const { return s_.image_width_px; }
    int height() const { return s_.image_height_px; }
    double fx() const { return fx_; }
    double fy() const { return fx_; }
    double cx() const { return 0.5 * s_.image_width_px; }
    double cy() const { return 0.5 * s_.image_height_px; }
    double exposure_s() const { return s_.exposure_s; }
    double near_m() const { return s_.near_m; }
    double far_m() const { return s_.far_m; }
    const RigidTransform& pose() const { return s_.pose; }

    vec3 to_camera(const vec3& world) const { return s_.pose.apply(world); }
    vec3 to_world(const vec3& cam) const { return s_.pose.apply_inverse(cam); }
    vec3 position() const { return to_world({0, 0, 0}); }
    // Unit view axis in world coordinates.
    vec3 forward() const { return s_.pose.rotation.transposed() * vec3{0, 0, 1}; }

  private:
    CameraSettings s_;
    double fx_;
};

struct ImagePoint {
    double u = 0, v = 0;
    double z_cam = 0;
};

// Perspective projection; empty when z_cam <= near. (u, v) may fall outside
// the image.
std::optional<ImagePoint> project(const CameraModel& cam, const vec3& world_point);

// Projection of a camera-space point with z > 0, no near test.
inline ImagePoint project_camera_space(const CameraModel& cam, const vec3& pc) {
    return {cam.cx() + cam.fx() * pc.x / pc.z, cam.cy() + cam.fy() * pc.y / pc.z, pc.z};
}

// Metric depth along the view axis, row-major with row 0 at the top. Sky
// pixels hold +infinity.
class DepthMap {
  public:
    DepthMap() = default;
    // Throws validation_error on NaN or non-positive depth. Values beyond
    // far_m can never occlude a drop inside the frustum and are stored as sky.
    DepthMap(int width, int height, std::vector<float> depth, double far_m);

    int width() const { return width_; }
    int height() const { return height_; }
    float at(int x, int y) const { return depth_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const float> values() const { return depth_; }
    static bool is_sky(float d) { return d == std::numeric_limits<float>::infinity(); }

  private:
    int width_ = 0, height_ = 0;
    std::vector<float> depth_;
};

// Number of evenly spaced points (both endpoints included) at which the swept
// segment of a drop is tested against the frustum.
inline constexpr int swept_segment_samples = 33;

// A drop is inside the frustum when some sample point of its swept segment
// [position, position + velocity * exposure] has near < z < far and projects
// inside the image rectangle grown by the drop's projected radius.
bool in_frustum(const CameraModel& cam, const Raindrop& drop);

std::vector<Raindrop> frustum_cull(const CameraModel& cam, std::span<const Raindrop> drops);

inline constexpr double default_occlusion_epsilon_m = 0.05;

// The segment midpoint is tested against the depth map at its pixel (clamped
// to the image). A drop whose midpoint lies at or before the near plane is
// kept. Sky never occludes.
bool unoccluded(const CameraModel& cam, const DepthMap& depth, const Raindrop& drop,
                double epsilon_m = default_occlusion_epsilon_m);

// Throws dimension_error when depth and camera sizes differ.
std::vector<Raindrop> occlusion_cull(const CameraModel& cam, const DepthMap& depth,
                                     std::span<const Raindrop> drops,
                                     double epsilon_m = default_occlusion_epsilon_m);

void check_dimensions(const CameraModel& cam, const DepthMap& depth);

// World-space bounding box of the frustum between near and far, padded by
// `pad_m` on every side.
SimVolume frustum_bounds(const CameraModel& cam, double pad_m);

}  // namespace rainforge
