#pragma once

// Raindrop spawning and kinematics. Drops fall at terminal velocity for the
// whole exposure, pushed horizontally by the wind.

#include "rainforge/drop_size.hpp"
#include "rainforge/units.hpp"
#include "rainforge/vec.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rainforge {

struct Raindrop {
    std::uint64_t id = 0;
    vec3 position;  // drop center at exposure start, meters
    double diameter = 0;
    vec3 velocity;  // m/s, constant over the exposure

    vec3 position_at(double t) const { return position + velocity * t; }
};

class SimVolume {
  public:
    SimVolume(vec3 min_corner, vec3 max_corner);

    const vec3& min_corner() const { return min_; }
    const vec3& max_corner() const { return max_; }
    vec3 extent() const { return max_ - min_; }
    vec3 center() const { return (min_ + max_) * 0.5; }
    double volume_m3() const {
        const vec3 e = extent();
        return e.x * e.y * e.z;
    }
    bool contains(const vec3& p) const {
        return p.x >= min_.x && p.x <= max_.x && p.y >= min_.y && p.y <= max_.y &&
               p.z >= min_.z && p.z <= max_.z;
    }

  private:
    vec3 min_, max_;
};

// Kessler: v_t = 130 sqrt(D), D in meters. Throws domain_error for d <= 0.
double terminal_velocity(double d);

// (wind.vx, -v_t(d), wind.vz).
vec3 drop_velocity(double d, const WindVector& wind);

enum class CountMode { round_half_even, poisson };

inline constexpr std::uint64_t default_particle_budget = 50'000'000;

struct SpawnOptions {
    std::optional<std::uint64_t> count_override;
    CountMode count_mode = CountMode::round_half_even;
    std::uint64_t particle_budget = default_particle_budget;
};

// total_concentration * volume.
double expected_drop_count(const SimVolume& volume, const DropSizeDistribution& dsd);

// Number of drops spawn_drops will produce. Throws resource_error when the
// count exceeds the budget.
std::uint64_t drop_count(const SimVolume& volume, const DropSizeDistribution& dsd,
                         std::uint64_t seed, const SpawnOptions& options = {});

// Drop `id` as a pure function of (volume, dsd, wind, seed, id).
Raindrop spawn_drop(const SimVolume& volume, const DropSizeDistribution& dsd,
                    const WindVector& wind, std::uint64_t seed, std::uint64_t id);

std::vector<Raindrop> spawn_drops(const SimVolume& volume, const DropSizeDistribution& dsd,
                                  const WindVector& wind, std::uint64_t seed,
                                  const SpawnOptions& options = {}, unsigned threads = 1);

}  // namespace rainforge
