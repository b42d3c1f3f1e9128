#include "rainforge/pipeline.hpp"

#include "rainforge/drop_size.hpp"
#include "rainforge/errors.hpp"
#include "rainforge/image_io.hpp"
#include "rainforge/mesh_export.hpp"
#include "rainforge/parallel.hpp"
#include "rainforge/particles.hpp"
#include "rainforge/rng.hpp"
#include "rainforge/streak.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rainforge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool has_extension(const fs::path& p, const char* ext) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

std::uint16_t quantize(double v, int max_value) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * max_value));
}

PngImage rgb_to_png(const RgbImage& img, int bit_depth) {
    PngImage png{img.width, img.height, 3, bit_depth, {}};
    png.samples.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) png.samples[i] = quantize(img.pixels[i], png.max_value());
    return png;
}

void write_background_copy(const fs::path& path, const Background& bg) {
    if (bg.kind == Background::Kind::pfm)
        write_pfm(path, {bg.encoded.width, bg.encoded.height, 3, bg.encoded.pixels});
    else
        write_png(path, rgb_to_png(bg.encoded, bg.bit_depth));
}

void write_depth_outputs(const fs::path& preview, const fs::path& raw, const DepthMap& depth, double far_m) {
    PngImage png{depth.width(), depth.height(), 1, 16, {}};
    png.samples.reserve(depth.values().size());
    for (float d : depth.values())
        png.samples.push_back(DepthMap::is_sky(d) ? std::uint16_t{65535} : quantize(double(d) / far_m, 65535));
    write_png(preview, png);
    write_pfm(raw, {depth.width(), depth.height(), 1, {depth.values().begin(), depth.values().end()}});
}

void write_rain_layer(const fs::path& png_path, const fs::path& tau_path, const RainLayer& layer, Transfer transfer) {
    PngImage png{layer.width, layer.height, 4, 8, {}};
    png.samples.resize(layer.pixel_count() * 4);
    for (std::size_t i = 0; i < layer.pixel_count(); ++i) {
        const double a = layer.alpha[i];
        for (int c = 0; c < 3; ++c) {
            double straight = a > 0.0 ? std::clamp(layer.color[3 * i + c] / a, 0.0, 1.0) : 0.0;
            if (transfer == Transfer::srgb) straight = linear_to_srgb(straight);
            png.samples[4 * i + c] = quantize(straight, 255);
        }
        png.samples[4 * i + 3] = quantize(a, 255);
    }
    write_png(png_path, png);
    write_pfm(tau_path, {layer.width, layer.height, 1, layer.tau1});
}

struct ChunkResult {
    std::vector<StreakSegment> segments;
    std::vector<Raindrop> visible;
    std::uint64_t frustum = 0;
};

std::string rel(const std::string& id, const char* name) { return id + "/" + name; }

}  // namespace

Background load_background(const fs::path& path) {
    Background bg;
    if (has_extension(path, ".pfm")) {
        const PfmImage pfm = read_pfm(path);
        bg.kind = Background::Kind::pfm;
        bg.encoded = RgbImage{pfm.width, pfm.height};
        for (std::size_t p = 0; p < static_cast<std::size_t>(pfm.width) * pfm.height; ++p)
            for (int c = 0; c < 3; ++c) {
                const float v = pfm.data[p * pfm.channels + (pfm.channels == 3 ? c : 0)];
                if (!std::isfinite(v) || v < 0.0f || v > 1.0f)
                    throw decode_error(path.string() + ": background values must lie in [0, 1]");
                bg.encoded.pixels[p * 3 + c] = v;
            }
        return bg;
    }
    const PngImage png = read_png(path);
    bg.kind = Background::Kind::png;
    bg.bit_depth = png.bit_depth;
    bg.encoded = RgbImage{png.width, png.height};
    const double scale = 1.0 / png.max_value();
    const bool gray = png.channels <= 2;
    for (int y = 0; y < png.height; ++y)
        for (int x = 0; x < png.width; ++x)
            for (int c = 0; c < 3; ++c)
                bg.encoded.at(x, y, c) = static_cast<float>(png.at(x, y, gray ? 0 : c) * scale);
    return bg;
}

DepthMap load_depth(const fs::path& path, const DepthFormat& format, double far_m) {
    int w = 0, h = 0;
    std::vector<float> values;
    if (format.kind == DepthFormat::Kind::pfm) {
        PfmImage pfm = read_pfm(path);
        if (pfm.channels != 1) throw decode_error(path.string() + ": depth PFM must be single-channel");
        w = pfm.width;
        h = pfm.height;
        values = std::move(pfm.data);
    } else {
        const PngImage png = read_png(path);
        if (png.channels != 1 || png.bit_depth != 16)
            throw decode_error(path.string() + ": depth PNG must be 16-bit grayscale");
        w = png.width;
        h = png.height;
        values.resize(png.samples.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const std::uint16_t code = png.samples[i];
            values[i] = (format.sky_is_max && code == 65535) ? std::numeric_limits<float>::infinity()
                                                             : static_cast<float>(code * format.depth_scale_m);
        }
    }
    try {
        return DepthMap{w, h, std::move(values), far_m};
    } catch (const validation_error& e) {
        throw decode_error(path.string() + ": " + e.what());
    }
}

JobResult run_job(const JobConfig& job, const fs::path& output_dir, const RunOptions& options) {
    const Background bg = load_background(job.background_path());
    const int width = bg.encoded.width, height = bg.encoded.height;
    const DepthMap depth = load_depth(job.depth_path(), job.depth_format, job.camera.far_m);
    if (depth.width() != width || depth.height() != height)
        throw dimension_error("background " + std::to_string(width) + "x" + std::to_string(height) +
                              " and depth " + std::to_string(depth.width()) + "x" + std::to_string(depth.height()) +
                              " differ in size");
    if ((job.camera.image_width_px && job.camera.image_width_px != width) ||
        (job.camera.image_height_px && job.camera.image_height_px != height))
        throw dimension_error("camera image size does not match the background");

    const CameraModel cam{job.camera.settings(width, height)};
    const RainIntensity intensity{job.rain.intensity_mm_per_h};
    const DropSizeDistribution dsd = marshall_palmer(intensity, job.rain.diameter_range);
    const WindVector wind = job.rain.wind;

    const double d_max = job.rain.diameter_range.d_max();
    const double max_speed = std::hypot(terminal_velocity(d_max), wind.magnitude());
    const SimVolume volume = job.rain.volume ? *job.rain.volume
                                             : frustum_bounds(cam, max_speed * cam.exposure_s() + d_max);
    SpawnOptions spawn;
    spawn.count_override = job.rain.count_override;
    spawn.count_mode = job.rain.count_mode;
    spawn.particle_budget = job.rain.particle_budget;

    JobStats stats;
    stats.expected_drops = expected_drop_count(volume, dsd);
    stats.spawned_drops = drop_count(volume, dsd, job.seed, spawn);

    // Drops are generated, culled and projected chunk by chunk; only visible
    // ones are kept. Per-drop state depends on (seed, id) alone.
    constexpr std::uint64_t chunk = 1 << 16;
    const std::size_t chunks = static_cast<std::size_t>((stats.spawned_drops + chunk - 1) / chunk);
    std::vector<ChunkResult> parts(chunks);
    const double eps = job.rain.occlusion_epsilon_m;
    parallel_for(chunks, options.threads, [&](std::size_t c) {
        ChunkResult& out = parts[c];
        const std::uint64_t end = std::min<std::uint64_t>(stats.spawned_drops, (c + 1) * chunk);
        for (std::uint64_t id = c * chunk; id < end; ++id) {
            const Raindrop drop = spawn_drop(volume, dsd, wind, job.seed, id);
            if (!in_frustum(cam, drop)) continue;
            ++out.frustum;
            if (!unoccluded(cam, depth, drop, eps)) continue;
            out.segments.push_back(streak_segment(cam, drop));
            if (options.export_quads) out.visible.push_back(drop);
        }
    });
    std::vector<StreakSegment> segments;
    std::vector<Raindrop> visible;
    for (ChunkResult& part : parts) {
        stats.frustum_drops += part.frustum;
        segments.insert(segments.end(), part.segments.begin(), part.segments.end());
        visible.insert(visible.end(), part.visible.begin(), part.visible.end());
        part = {};
    }
    stats.visible_drops = segments.size();

    StreakAppearance appearance;
    appearance.mode = job.appearance.mode;
    appearance.procedural = job.appearance.procedural;
    appearance.gain = job.appearance.gain;
    appearance.opacity = job.appearance.opacity;
    if (appearance.mode == StreakAppearance::Mode::database)
        appearance.atlas = std::make_shared<const StreakAtlas>(load_streak_atlas(job.atlas_path()));

    RasterOptions raster;
    raster.depth = &depth;
    raster.occlusion_epsilon_m = eps;
    raster.threads = options.threads;
    const RainLayer layer = rasterize(RainLayer{width, height}, segments, appearance, job.seed, cam.exposure_s(), raster);
    segments = {};
    stats.coverage = layer.coverage();

    BlendParams blend_params{cam.exposure_s(), job.tau0_s.value_or(reference_tau0_s)};
    const RgbImage linear_bg = linearize(bg.encoded, job.transfer);
    const RgbImage rainy = delinearize(blend(linear_bg, layer, blend_params, options.threads), job.transfer);

    const fs::path dir = output_dir / job.id;
    fs::create_directories(dir);
    const std::string bg_name = bg.kind == Background::Kind::pfm ? "background.pfm" : "background.png";
    write_background_copy(dir / bg_name, bg);
    write_depth_outputs(dir / "depth.png", dir / "depth.pfm", depth, cam.far_m());
    write_rain_layer(dir / "rain_layer.png", dir / "rain_tau1.pfm", layer, job.transfer);
    write_png(dir / "rainy.png", rgb_to_png(rainy, bg.kind == Background::Kind::png ? bg.bit_depth : 8));

    json record;
    record["id"] = job.id;
    record["status"] = "ok";
    record["background"] = rel(job.id, bg_name.c_str());
    record["depth"] = rel(job.id, "depth.png");
    record["depth_raw"] = rel(job.id, "depth.pfm");
    record["rain_layer"] = rel(job.id, "rain_layer.png");
    record["rain_tau1"] = rel(job.id, "rain_tau1.pfm");
    record["rainy"] = rel(job.id, "rainy.png");
    if (options.hdr) {
        const RgbImage hdr = blend_hdr(linear_bg, layer, blend_params, options.threads);
        write_pfm(dir / "rainy_hdr.pfm", {hdr.width, hdr.height, 3, hdr.pixels});
        record["rainy_hdr"] = rel(job.id, "rainy_hdr.pfm");
    }
    if (options.export_quads) {
        const std::size_t quads = export_quads(cam, visible, dir / "streaks.obj", options.quads_per_pixel);
        record["mesh"] = rel(job.id, "streaks.obj");
        record["mesh_quads"] = quads;
        record["mesh_mode"] = options.quads_per_pixel ? "per_pixel" : "per_streak";
    }
    record["intensity_mm_per_h"] = job.rain.intensity_mm_per_h;
    record["wind_m_per_s"] = {wind.vx(), wind.vz()};
    record["seed"] = job.seed;
    record["rng_algorithm"] = rng_algorithm_id;
    record["tool_version"] = tool_version;
    const vec3 pos = cam.position(), fwd = cam.forward();
    record["camera"] = {{"width_px", width},
                        {"height_px", height},
                        {"focal_length_mm", job.camera.focal_length_mm},
                        {"sensor_width_mm", job.camera.sensor_width_mm},
                        {"fx_px", cam.fx()},
                        {"exposure_s", cam.exposure_s()},
                        {"near_m", cam.near_m()},
                        {"far_m", cam.far_m()},
                        {"position_m", {pos.x, pos.y, pos.z}},
                        {"forward", {fwd.x, fwd.y, fwd.z}}};
    record["tau0_s"] = blend_params.tau0_s;
    record["tau0_overridden"] = job.tau0_s.has_value();
    const vec3 lo = volume.min_corner(), hi = volume.max_corner();
    record["volume_m"] = {{"min", {lo.x, lo.y, lo.z}}, {"max", {hi.x, hi.y, hi.z}}};
    record["stats"] = {{"expected_drops", stats.expected_drops},
                       {"spawned_drops", stats.spawned_drops},
                       {"frustum_drops", stats.frustum_drops},
                       {"visible_drops", stats.visible_drops},
                       {"coverage", stats.coverage}};
    json resolved = job_to_json(job);
    if (!job.appearance.atlas_dir.empty())
        resolved["appearance"]["atlas_dir"] = fs::absolute(job.atlas_path()).lexically_normal().string();
    record["job"] = resolved;
    return {record, stats};
}

json run_batch(const BatchConfig& batch, const BatchOptions& options) {
    std::vector<JobConfig> jobs = batch.jobs;
    if (options.seed_override)
        for (JobConfig& job : jobs) job.seed = *options.seed_override;

    const unsigned parallelism = std::max(1u, options.parallelism);
    RunOptions run = options.run;
    if (run.threads == 0) run.threads = std::max(1u, default_thread_count() / parallelism);

    std::vector<json> records(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<bool> stop{false};
    fs::create_directories(batch.output_dir);
    parallel_for(jobs.size(), parallelism, [&](std::size_t i) {
        if (stop) return;
        try {
            records[i] = run_job(jobs[i], batch.output_dir, run).record;
        } catch (const std::exception& e) {
            failures[i] = std::current_exception();
            const auto* typed = dynamic_cast<const error*>(&e);
            records[i] = {{"id", jobs[i].id},
                          {"status", "error"},
                          {"error_kind", typed ? typed->kind() : "internal"},
                          {"message", e.what()}};
            if (options.fail_fast) stop = true;
        }
    });
    if (options.fail_fast)
        for (const auto& f : failures)
            if (f) std::rethrow_exception(f);

    std::sort(records.begin(), records.end(),
              [](const json& a, const json& b) { return a["id"].get<std::string>() < b["id"].get<std::string>(); });
    json manifest = {{"schema_version", manifest_schema_version},
                     {"tool", tool_name},
                     {"tool_version", tool_version},
                     {"rng_algorithm", rng_algorithm_id},
                     {"records", records}};
    const fs::path path = batch.output_dir / "manifest.json";
    std::ofstream out{path, std::ios::binary};
    out << manifest.dump(2) << '\n';
    if (!out) throw io_error("cannot write " + path.string());
    return manifest;
}

BatchConfig batch_from_manifest(const fs::path& manifest_path, const fs::path& output_dir) {
    std::ifstream in{manifest_path};
    if (!in) throw io_error("cannot open manifest " + manifest_path.string());
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error("cannot parse " + manifest_path.string() + ": " + e.what());
    }
    if (!manifest.contains("records") || !manifest["records"].is_array())
        throw config_error(manifest_path.string() + " has no records array");
    BatchConfig batch;
    batch.output_dir = output_dir;
    const fs::path base = manifest_path.parent_path();
    for (std::size_t i = 0; i < manifest["records"].size(); ++i) {
        const json& rec = manifest["records"][i];
        if (rec.value("status", "") != "ok") continue;
        json job = rec.at("job");
        job["background"] = rec.at("background");
        job["depth"] = rec.at("depth_raw");
        job["depth_format"] = {{"type", "pfm"}};
        batch.jobs.push_back(parse_job(job, base, "records[" + std::to_string(i) + "].job"));
    }
    return batch;
}

std::string manifest_stats_csv(const json& manifest) {
    std::ostringstream csv;
    csv << "id,status,intensity_mm_per_h,wind_vx_m_per_s,wind_vz_m_per_s,seed,expected_drops,spawned_drops,"
           "frustum_drops,visible_drops,coverage\n";
    for (const json& rec : manifest.at("records")) {
        csv << rec.at("id").get<std::string>() << ',' << rec.at("status").get<std::string>();
        if (rec.at("status") == "ok") {
            const json& s = rec.at("stats");
            csv << ',' << rec["intensity_mm_per_h"].dump() << ',' << rec["wind_m_per_s"][0].dump() << ','
                << rec["wind_m_per_s"][1].dump() << ',' << rec["seed"].dump() << ',' << s["expected_drops"].dump()
                << ',' << s["spawned_drops"].dump() << ',' << s["frustum_drops"].dump() << ','
                << s["visible_drops"].dump() << ',' << s["coverage"].dump();
        } else {
            csv << ",,,,,,,,,";
        }
        csv << '\n';
    }
    return csv.str();
}

std::vector<std::string> validate_inputs(const BatchConfig& batch) {
    std::vector<std::string> problems;
    for (const JobConfig& job : batch.jobs) {
        try {
            const Background bg = load_background(job.background_path());
            const DepthMap depth = load_depth(job.depth_path(), job.depth_format, job.camera.far_m);
            if (depth.width() != bg.encoded.width || depth.height() != bg.encoded.height)
                throw dimension_error("background and depth differ in size");
            if ((job.camera.image_width_px && job.camera.image_width_px != bg.encoded.width) ||
                (job.camera.image_height_px && job.camera.image_height_px != bg.encoded.height))
                throw dimension_error("camera image size does not match the background");
            if (job.appearance.mode == StreakAppearance::Mode::database) {
                StreakAppearance app;
                app.mode = job.appearance.mode;
                app.atlas = std::make_shared<const StreakAtlas>(load_streak_atlas(job.atlas_path()));
                app.validate();
            }
        } catch (const error& e) {
            problems.push_back(job.id + ": " + e.what());
        }
    }
    return problems;
}

}  // namespace rainforge
