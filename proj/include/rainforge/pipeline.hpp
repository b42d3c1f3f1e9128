#pragma once

// End-to-end record generation: load inputs, spawn and cull drops, rasterize
// the rain layer, blend, and write the paired record plus a manifest.

#include "rainforge/camera.hpp"
#include "rainforge/composite.hpp"
#include "rainforge/config.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace rainforge {

inline constexpr const char* tool_name = "rainforge";
inline constexpr const char* tool_version = "0.1.0";
inline constexpr int manifest_schema_version = 1;

struct Background {
    RgbImage encoded;  // channel values in [0, 1] as stored in the file
    enum class Kind { png, pfm } kind = Kind::png;
    int bit_depth = 8;  // PNG only
};

// 8/16-bit gray or RGB(A) PNG (alpha dropped), or RGB/gray PFM.
Background load_background(const std::filesystem::path& path);

// Decodes a depth file into meters; PNG code 0 is rejected as non-positive.
DepthMap load_depth(const std::filesystem::path& path, const DepthFormat& format, double far_m);

struct RunOptions {
    bool hdr = false;            // also write the unclamped rainy image as PFM
    bool export_quads = false;   // write an OBJ of streak quads
    bool quads_per_pixel = false;
    unsigned threads = 1;        // intra-job worker threads
};

struct JobStats {
    double expected_drops = 0;
    std::uint64_t spawned_drops = 0;
    std::uint64_t frustum_drops = 0;
    std::uint64_t visible_drops = 0;
    double coverage = 0;  // fraction of pixels with rain alpha > 0
};

struct JobResult {
    nlohmann::json record;  // manifest entry
    JobStats stats;
};

// Runs one job, writing its files under output_dir/<id>/. Throws the typed
// error of the first failure.
JobResult run_job(const JobConfig& job, const std::filesystem::path& output_dir,
                  const RunOptions& options = {});

struct BatchOptions {
    RunOptions run;
    unsigned parallelism = 1;  // concurrent jobs
    bool fail_fast = false;
    std::optional<std::uint64_t> seed_override;
};

// Runs every job and writes output_dir/manifest.json. Job failures become
// error records unless fail_fast is set, in which case the failure of the
// lowest-index job is rethrown after all running jobs finish.
nlohmann::json run_batch(const BatchConfig& batch, const BatchOptions& options = {});

// Rebuilds a batch from a manifest: every successful record becomes a job fed
// from the record's own background copy and raw depth.
BatchConfig batch_from_manifest(const std::filesystem::path& manifest_path,
                                const std::filesystem::path& output_dir);

// One CSV row per record: drop counts and coverage.
std::string manifest_stats_csv(const nlohmann::json& manifest);

// Checks that every referenced input exists and decodes with matching sizes.
// Returns one message per problem; empty means the batch can run.
std::vector<std::string> validate_inputs(const BatchConfig& batch);

}  // namespace rainforge
