#pragma once

#include "rainforge/camera.hpp"
#include "rainforge/particles.hpp"

#include <cstddef>
#include <filesystem>
#include <span>

namespace rainforge {

struct QuadMesh {
    std::vector<vec3> vertices;  // 4 per quad, counter-clockwise seen from the camera
    std::size_t quad_count() const { return vertices.size() / 4; }
};

// One world-space quad per drop: the swept segment widened by the drop
// diameter, turned about the segment axis to face the camera's view axis.
QuadMesh streak_billboards(const CameraModel& cam, std::span<const Raindrop> drops);

// One quad per covered streak pixel, back-projected to the streak depth at
// that pixel and parallel to the image plane.
QuadMesh streak_pixel_quads(const CameraModel& cam, std::span<const Raindrop> drops);

// ASCII Wavefront OBJ, world coordinates in meters, one "f" record per quad.
// Throws io_error when the file cannot be written.
void write_obj(const std::filesystem::path& path, const QuadMesh& mesh);

// Builds the mesh in the requested mode and writes it; returns the quad count.
std::size_t export_quads(const CameraModel& cam, std::span<const Raindrop> drops,
                         const std::filesystem::path& path, bool per_pixel = false);

}  // namespace rainforge
