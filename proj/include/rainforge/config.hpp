#pragma once

// JSON job configuration (schema version 1).
//
//   {
//     "schema_version": 1,
//     "output_dir": "out",
//     "defaults": { <job keys> },
//     "jobs": [ { "id": "...", <job keys> }, ... ]
//   }
//
// Each job is the defaults object merge-patched with the job object. Unknown
// keys are rejected with their full key path. Relative paths are resolved
// against the directory holding the config file. README.md lists every key.

#include "rainforge/camera.hpp"
#include "rainforge/composite.hpp"
#include "rainforge/particles.hpp"
#include "rainforge/streak.hpp"
#include "rainforge/units.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rainforge {

inline constexpr int config_schema_version = 1;

struct DepthFormat {
    enum class Kind { pfm, png16 } kind = Kind::pfm;
    double depth_scale_m = 0.001;  // meters per PNG code
    bool sky_is_max = false;       // PNG code 65535 means sky
};

struct CameraConfig {
    double focal_length_mm = 40.0;
    double sensor_width_mm = 36.0;
    int image_width_px = 0;  // 0: take from the background
    int image_height_px = 0;
    vec3 position_m{0.0, 1.5, 0.0};
    double yaw_deg = 0, pitch_deg = 0, roll_deg = 0;
    double exposure_s = 1.0 / 60.0;
    double near_m = 0.1;
    double far_m = 20.0;

    CameraSettings settings(int width, int height) const;
};

struct RainConfig {
    double intensity_mm_per_h = 25.0;
    WindVector wind;  // resolved; direction input is converted here
    std::optional<double> slant_deg, azimuth_deg;  // as given, if any
    DiameterRange diameter_range = DiameterRange::default_range();
    std::optional<std::uint64_t> count_override;
    CountMode count_mode = CountMode::round_half_even;
    std::uint64_t particle_budget = default_particle_budget;
    std::optional<SimVolume> volume;
    double occlusion_epsilon_m = default_occlusion_epsilon_m;
};

struct AppearanceConfig {
    StreakAppearance::Mode mode = StreakAppearance::Mode::procedural;
    ProceduralStreak procedural;
    std::string atlas_dir;  // as written
    double gain = 1.0;
    double opacity = 1.0;
};

struct JobConfig {
    std::string id;
    std::string background;  // paths as written in the config
    std::string depth;
    std::filesystem::path base_dir;  // resolves the paths above
    DepthFormat depth_format;
    Transfer transfer = Transfer::srgb;
    std::uint64_t seed = 0;
    CameraConfig camera;
    RainConfig rain;
    AppearanceConfig appearance;
    std::optional<double> tau0_s;

    std::filesystem::path background_path() const { return base_dir / background; }
    std::filesystem::path depth_path() const { return base_dir / depth; }
    std::filesystem::path atlas_path() const { return base_dir / appearance.atlas_dir; }
};

struct BatchConfig {
    std::filesystem::path output_dir;
    std::vector<JobConfig> jobs;
};

// Throws config_error naming the offending key path.
BatchConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
BatchConfig load_config(const std::filesystem::path& path);

// Parses one job object (already merged with defaults). `where` prefixes key
// paths in error messages.
JobConfig parse_job(const nlohmann::json& job, const std::filesystem::path& base_dir,
                    const std::string& where);

// The job in config form with every default spelled out. parse_job of the
// result yields the same job.
nlohmann::json job_to_json(const JobConfig& job);

// Wind for a streak slant angle (degrees from vertical) measured on a 1 mm
// reference drop, blowing toward azimuth (degrees from +x toward +z).
WindVector wind_from_direction(double slant_deg, double azimuth_deg);

}  // namespace rainforge
