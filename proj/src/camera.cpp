#include "rainforge/camera.hpp"

#include "rainforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rainforge {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

mat3 rot_x(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
}
mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
}
mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
}

}  // namespace

RigidTransform pose_from_euler(const vec3& position, double yaw_deg, double pitch_deg,
                               double roll_deg) {
    // Camera axes (right, down, forward) expressed in world coordinates.
    const mat3 base{{{1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
    const mat3 cam_to_world = rot_y(yaw_deg * deg) * rot_x(pitch_deg * deg) * rot_z(roll_deg * deg) * base;
    RigidTransform pose;
    pose.rotation = cam_to_world.transposed();
    pose.translation = -(pose.rotation * position);
    return pose;
}

CameraModel::CameraModel(const CameraSettings& s) : s_{s} {
    if (!(s.focal_length_mm >= 1.0 && s.focal_length_mm <= 500.0))
        throw validation_error("focal length must lie in [1, 500] mm, got " +
                               std::to_string(s.focal_length_mm));
    if (!(s.sensor_width_mm > 0.0 && std::isfinite(s.sensor_width_mm)))
        throw validation_error("sensor width must be positive");
    if (s.image_width_px <= 0 || s.image_height_px <= 0)
        throw validation_error("image dimensions must be positive");
    if (!(s.exposure_s > 0.0 && std::isfinite(s.exposure_s)))
        throw validation_error("exposure time must be positive");
    if (!(s.near_m > 0.0 && s.near_m < s.far_m && std::isfinite(s.far_m)))
        throw validation_error("clip planes must satisfy 0 < near < far");
    if (!isfinite(s.pose.translation))
        throw validation_error("camera translation must be finite");
    fx_ = s.focal_length_mm / s.sensor_width_mm * s.image_width_px;
}

std::optional<ImagePoint> project(const CameraModel& cam, const vec3& world_point) {
    const vec3 pc = cam.to_camera(world_point);
    if (!(pc.z > cam.near_m())) return std::nullopt;
    return project_camera_space(cam, pc);
}

DepthMap::DepthMap(int width, int height, std::vector<float> depth, double far_m)
    : width_{width}, height_{height}, depth_{std::move(depth)} {
    if (width <= 0 || height <= 0) throw validation_error("depth map dimensions must be positive");
    if (depth_.size() != static_cast<std::size_t>(width) * height)
        throw validation_error("depth map buffer size does not match dimensions");
    for (float& d : depth_) {
        if (std::isnan(d) || !(d > 0.0f))
            throw validation_error("depth map contains a non-positive or NaN value");
        if (d > far_m) d = std::numeric_limits<float>::infinity();
    }
}

namespace {

// Six linear half-space tests equivalent (for z > near > 0) to the projected
// bounds checks. Bit set = test failed.
struct FrustumPlanes {
    double fx, cx, cy, w, h, near, far;

    unsigned outcode(const vec3& p, double radius) const {
        const double fr = fx * radius;
        unsigned code = 0;
        if (!(p.z > near)) code |= 1u;
        if (!(p.z < far)) code |= 2u;
        if (cx * p.z + fx * p.x + fr < 0.0) code |= 4u;
        if ((w - cx) * p.z - fx * p.x + fr < 0.0) code |= 8u;
        if (cy * p.z + fx * p.y + fr < 0.0) code |= 16u;
        if ((h - cy) * p.z - fx * p.y + fr < 0.0) code |= 32u;
        return code;
    }
};

FrustumPlanes planes_of(const CameraModel& cam) {
    return {cam.fx(), cam.cx(), cam.cy(), double(cam.width()), double(cam.height()), cam.near_m(),
            cam.far_m()};
}

bool in_frustum(const FrustumPlanes& planes, const CameraModel& cam, const Raindrop& drop) {
    const double radius = 0.5 * drop.diameter;
    const vec3 a = cam.to_camera(drop.position);
    const vec3 b = cam.to_camera(drop.position_at(cam.exposure_s()));
    const unsigned ca = planes.outcode(a, radius);
    const unsigned cb = planes.outcode(b, radius);
    if ((ca | cb) == 0) return true;   // convexity: every sample passes
    if ((ca & cb) != 0) return false;  // linearity: every sample fails one test
    if (ca == 0 || cb == 0) return true;
    const vec3 step = (b - a) * (1.0 / (swept_segment_samples - 1));
    for (int k = 1; k < swept_segment_samples - 1; ++k)
        if (planes.outcode(a + step * double(k), radius) == 0) return true;
    return false;
}

}  // namespace

bool in_frustum(const CameraModel& cam, const Raindrop& drop) {
    return in_frustum(planes_of(cam), cam, drop);
}

std::vector<Raindrop> frustum_cull(const CameraModel& cam, std::span<const Raindrop> drops) {
    const FrustumPlanes planes = planes_of(cam);
    std::vector<Raindrop> kept;
    for (const Raindrop& d : drops)
        if (in_frustum(planes, cam, d)) kept.push_back(d);
    return kept;
}

void check_dimensions(const CameraModel& cam, const DepthMap& depth) {
    if (cam.width() != depth.width() || cam.height() != depth.height())
        throw dimension_error("depth map is " + std::to_string(depth.width()) + "x" +
                              std::to_string(depth.height()) + " but camera is " +
                              std::to_string(cam.width()) + "x" + std::to_string(cam.height()));
}

bool unoccluded(const CameraModel& cam, const DepthMap& depth, const Raindrop& drop,
                double epsilon_m) {
    const auto mid = project(cam, drop.position_at(0.5 * cam.exposure_s()));
    if (!mid) return true;
    const int px = std::clamp(static_cast<int>(std::floor(mid->u)), 0, depth.width() - 1);
    const int py = std::clamp(static_cast<int>(std::floor(mid->v)), 0, depth.height() - 1);
    const float scene = depth.at(px, py);
    if (DepthMap::is_sky(scene)) return true;
    return mid->z_cam < double(scene) - epsilon_m;
}

std::vector<Raindrop> occlusion_cull(const CameraModel& cam, const DepthMap& depth,
                                     std::span<const Raindrop> drops, double epsilon_m) {
    check_dimensions(cam, depth);
    std::vector<Raindrop> kept;
    for (const Raindrop& d : drops)
        if (unoccluded(cam, depth, d, epsilon_m)) kept.push_back(d);
    return kept;
}

SimVolume frustum_bounds(const CameraModel& cam, double pad_m) {
    vec3 lo{INFINITY, INFINITY, INFINITY}, hi{-INFINITY, -INFINITY, -INFINITY};
    for (double z : {cam.near_m(), cam.far_m()})
        for (double u : {0.0, double(cam.width())})
            for (double v : {0.0, double(cam.height())}) {
                const vec3 pc{(u - cam.cx()) * z / cam.fx(), (v - cam.cy()) * z / cam.fy(), z};
                const vec3 w = cam.to_world(pc);
                lo = {std::min(lo.x, w.x), std::min(lo.y, w.y), std::min(lo.z, w.z)};
                hi = {std::max(hi.x, w.x), std::max(hi.y, w.y), std::max(hi.z, w.z)};
            }
    const vec3 pad{pad_m, pad_m, pad_m};
    return {lo - pad, hi + pad};
}

}  // namespace rainforge
