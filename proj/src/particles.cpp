#include "rainforge/particles.hpp"

#include "rainforge/errors.hpp"
#include "rainforge/parallel.hpp"
#include "rainforge/rng.hpp"

#include <cmath>
#include <string>

namespace rainforge {

SimVolume::SimVolume(vec3 min_corner, vec3 max_corner) : min_{min_corner}, max_{max_corner} {
    if (!isfinite(min_) || !isfinite(max_))
        throw validation_error("simulation volume corners must be finite");
    if (!(max_.x > min_.x && max_.y > min_.y && max_.z > min_.z))
        throw validation_error("simulation volume max corner must exceed min corner on every axis");
}

double terminal_velocity(double d) {
    if (!(d > 0.0)) throw domain_error("terminal_velocity: diameter must be positive");
    return 130.0 * std::sqrt(d);
}

vec3 drop_velocity(double d, const WindVector& wind) {
    return {wind.vx(), -terminal_velocity(d), wind.vz()};
}

double expected_drop_count(const SimVolume& volume, const DropSizeDistribution& dsd) {
    return total_concentration(dsd) * volume.volume_m3();
}

std::uint64_t drop_count(const SimVolume& volume, const DropSizeDistribution& dsd,
                         std::uint64_t seed, const SpawnOptions& options) {
    double count = 0;
    if (options.count_override) {
        count = static_cast<double>(*options.count_override);
    } else {
        const double expected = expected_drop_count(volume, dsd);
        if (options.count_mode == CountMode::poisson) {
            if (expected > static_cast<double>(options.particle_budget) * 2.0)
                count = expected;  // certain overflow; skip the draw
            else {
                CounterRng rng{seed, poisson_count_stream};
                count = static_cast<double>(sample_poisson(expected, rng));
            }
        } else {
            count = std::nearbyint(expected);  // default FP env rounds half to even
        }
    }
    if (count > static_cast<double>(options.particle_budget))
        throw resource_error("drop count " + std::to_string(static_cast<long double>(count)) +
                             " exceeds particle budget of " +
                             std::to_string(options.particle_budget));
    return static_cast<std::uint64_t>(count);
}

Raindrop spawn_drop(const SimVolume& volume, const DropSizeDistribution& dsd,
                    const WindVector& wind, std::uint64_t seed, std::uint64_t id) {
    // Stream layout per drop: [diameter, x, y, z]. The diameter draw must stay
    // first so it agrees with sample_diameters.
    CounterRng rng{seed, id};
    Raindrop drop;
    drop.id = id;
    drop.diameter = inverse_cdf(dsd, rng.uniform());
    const vec3 lo = volume.min_corner();
    const vec3 ext = volume.extent();
    const double ux = rng.uniform();
    const double uy = rng.uniform();
    const double uz = rng.uniform();
    drop.position = {lo.x + ux * ext.x, lo.y + uy * ext.y, lo.z + uz * ext.z};
    drop.velocity = drop_velocity(drop.diameter, wind);
    return drop;
}

std::vector<Raindrop> spawn_drops(const SimVolume& volume, const DropSizeDistribution& dsd,
                                  const WindVector& wind, std::uint64_t seed,
                                  const SpawnOptions& options, unsigned threads) {
    const std::uint64_t n = drop_count(volume, dsd, seed, options);
    std::vector<Raindrop> drops(n);
    constexpr std::size_t chunk = 1 << 14;
    const std::size_t chunks = (n + chunk - 1) / chunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t end = std::min<std::size_t>(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) drops[i] = spawn_drop(volume, dsd, wind, seed, i);
    });
    return drops;
}

}  // namespace rainforge
