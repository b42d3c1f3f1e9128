#include "rainforge/mesh_export.hpp"

#include "rainforge/errors.hpp"
#include "rainforge/streak.hpp"

#include <cstdio>
#include <memory>

namespace rainforge {

namespace {

// Appends a quad, flipping its winding if needed so the normal points back
// toward the camera.
void push_quad(QuadMesh& mesh, const vec3& toward_camera, vec3 a, vec3 b, vec3 c, vec3 d) {
    if (dot(cross(b - a, d - a), toward_camera) < 0.0) std::swap(b, d);
    mesh.vertices.insert(mesh.vertices.end(), {a, b, c, d});
}

}  // namespace

QuadMesh streak_billboards(const CameraModel& cam, std::span<const Raindrop> drops) {
    QuadMesh mesh;
    mesh.vertices.reserve(drops.size() * 4);
    const vec3 forward = cam.forward();
    const vec3 right = cam.to_world({1, 0, 0}) - cam.position();
    for (const Raindrop& drop : drops) {
        const vec3 p0 = drop.position;
        const vec3 p1 = drop.position_at(cam.exposure_s());
        vec3 side = cross(p1 - p0, forward);
        side = length(side) > 1e-12 ? normalize(side) : right;
        const vec3 h = side * (0.5 * drop.diameter);
        push_quad(mesh, -forward, p0 - h, p1 - h, p1 + h, p0 + h);
    }
    return mesh;
}

QuadMesh streak_pixel_quads(const CameraModel& cam, std::span<const Raindrop> drops) {
    QuadMesh mesh;
    const vec3 forward = cam.forward();
    auto unproject = [&](double u, double v, double z) {
        return cam.to_world({(u - cam.cx()) * z / cam.fx(), (v - cam.cy()) * z / cam.fy(), z});
    };
    for (const Raindrop& drop : drops) {
        const StreakSegment seg = streak_segment(cam, drop);
        const double du = seg.p1.u - seg.p0.u, dv = seg.p1.v - seg.p0.v;
        const double len2 = du * du + dv * dv;
        const double iz0 = 1.0 / seg.p0.z_cam, iz1 = 1.0 / seg.p1.z_cam;
        for (const PixelCoverage& px : streak_footprint(seg, cam.width(), cam.height())) {
            double s = 0.5;
            if (len2 > 0.0) s = std::clamp(((px.x + 0.5 - seg.p0.u) * du + (px.y + 0.5 - seg.p0.v) * dv) / len2, 0.0, 1.0);
            const double z = 1.0 / (iz0 + (iz1 - iz0) * s);
            push_quad(mesh, -forward, unproject(px.x, px.y, z), unproject(px.x + 1.0, px.y, z),
                      unproject(px.x + 1.0, px.y + 1.0, z), unproject(px.x, px.y + 1.0, z));
        }
    }
    return mesh;
}

void write_obj(const std::filesystem::path& path, const QuadMesh& mesh) {
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> f{std::fopen(path.c_str(), "wb"), &std::fclose};
    if (!f) throw io_error("cannot open " + path.string() + " for writing");
    bool ok = std::fprintf(f.get(), "# rain streak quads, world coordinates in meters\n# quads %zu\no rain_streaks\n",
                           mesh.quad_count()) > 0;
    for (const vec3& v : mesh.vertices) ok = ok && std::fprintf(f.get(), "v %.9g %.9g %.9g\n", v.x, v.y, v.z) > 0;
    for (std::size_t q = 0; q < mesh.quad_count(); ++q) {
        const std::size_t b = 4 * q + 1;
        ok = ok && std::fprintf(f.get(), "f %zu %zu %zu %zu\n", b, b + 1, b + 2, b + 3) > 0;
    }
    if (!ok || std::fflush(f.get()) != 0) throw io_error("cannot write " + path.string());
}

std::size_t export_quads(const CameraModel& cam, std::span<const Raindrop> drops,
                         const std::filesystem::path& path, bool per_pixel) {
    const QuadMesh mesh = per_pixel ? streak_pixel_quads(cam, drops) : streak_billboards(cam, drops);
    write_obj(path, mesh);
    return mesh.quad_count();
}

}  // namespace rainforge
