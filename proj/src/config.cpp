#include "rainforge/config.hpp"

#include "rainforge/errors.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace rainforge {

using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects the ones nobody asked for.
class Reader {
  public:
    Reader(const json& obj, std::string path) : obj_{obj}, path_{std::move(path)} {
        if (!obj_.is_object()) throw config_error(where() + " must be an object");
    }

    std::string key_path(const std::string& key) const {
        if (key.empty()) return where();
        return path_.empty() ? key : path_ + "." + key;
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) throw config_error(key_path(key) + " must be a number");
        return v->get<double>();
    }
    std::optional<double> opt_number(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number()) throw config_error(key_path(key) + " must be a number");
        return v->get<double>();
    }
    std::optional<std::uint64_t> opt_count(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
            throw config_error(key_path(key) + " must be a non-negative integer");
        return v->get<std::uint64_t>();
    }
    int integer(const std::string& key, int fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw config_error(key_path(key) + " must be an integer");
        return v->get<int>();
    }
    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw config_error(key_path(key) + " must be true or false");
        return v->get<bool>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw config_error(key_path(key) + " must be a string");
        return v->get<std::string>();
    }
    std::string required_string(const std::string& key) {
        const json* v = find(key);
        if (!v) throw config_error(key_path(key) + " is required");
        if (!v->is_string()) throw config_error(key_path(key) + " must be a string");
        return v->get<std::string>();
    }
    std::vector<double> numbers(const std::string& key, std::size_t n) {
        const json* v = find(key);
        if (!v) return {};
        if (!v->is_array() || v->size() != n) throw config_error(key_path(key) + " must be an array of " + std::to_string(n) + " numbers");
        std::vector<double> out;
        for (const auto& x : *v) {
            if (!x.is_number()) throw config_error(key_path(key) + " must contain only numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    std::optional<Reader> object(const std::string& key) {
        const json* v = find(key);
        if (!v) return std::nullopt;
        return Reader{*v, key_path(key)};
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw config_error("unknown key " + key_path(it.key()));
    }

  private:
    std::string where() const { return path_.empty() ? "config" : path_; }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

// Converts validation errors from value types into config errors with a path.
template <typename Fn>
auto checked(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const validation_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

}  // namespace

CameraSettings CameraConfig::settings(int width, int height) const {
    CameraSettings s;
    s.focal_length_mm = focal_length_mm;
    s.sensor_width_mm = sensor_width_mm;
    s.image_width_px = width;
    s.image_height_px = height;
    s.pose = pose_from_euler(position_m, yaw_deg, pitch_deg, roll_deg);
    s.exposure_s = exposure_s;
    s.near_m = near_m;
    s.far_m = far_m;
    return s;
}

WindVector wind_from_direction(double slant_deg, double azimuth_deg) {
    if (!(slant_deg >= 0.0 && slant_deg < 90.0))
        throw validation_error("rain slant must lie in [0, 90) degrees");
    const double deg = std::numbers::pi / 180.0;
    const double speed = terminal_velocity(1e-3) * std::tan(slant_deg * deg);
    return {speed * std::cos(azimuth_deg * deg), speed * std::sin(azimuth_deg * deg)};
}

JobConfig parse_job(const json& obj, const std::filesystem::path& base_dir, const std::string& where) {
    Reader r{obj, where};
    JobConfig job;
    job.base_dir = base_dir;
    job.id = r.required_string("id");
    if (job.id.empty() || job.id.find_first_of("/\\") != std::string::npos || job.id == "." || job.id == "..")
        throw config_error(r.key_path("id") + " must be a non-empty name without path separators");
    job.background = r.required_string("background");
    job.depth = r.required_string("depth");

    if (auto df = r.object("depth_format")) {
        const std::string kind = df->string("type", "pfm");
        if (kind == "pfm")
            job.depth_format.kind = DepthFormat::Kind::pfm;
        else if (kind == "png16")
            job.depth_format.kind = DepthFormat::Kind::png16;
        else
            throw config_error(df->key_path("type") + " must be \"pfm\" or \"png16\"");
        job.depth_format.depth_scale_m = df->number("depth_scale_m", job.depth_format.depth_scale_m);
        if (!(job.depth_format.depth_scale_m > 0.0)) throw config_error(df->key_path("depth_scale_m") + " must be positive");
        job.depth_format.sky_is_max = df->boolean("sky_is_max", false);
        df->finish();
    }

    const std::string transfer = r.string("transfer", "srgb");
    if (transfer == "srgb")
        job.transfer = Transfer::srgb;
    else if (transfer == "linear")
        job.transfer = Transfer::linear;
    else
        throw config_error(r.key_path("transfer") + " must be \"srgb\" or \"linear\"");

    if (auto seed = r.opt_count("seed")) job.seed = *seed;

    if (auto cam = r.object("camera")) {
        auto& c = job.camera;
        c.focal_length_mm = cam->number("focal_length_mm", c.focal_length_mm);
        c.sensor_width_mm = cam->number("sensor_width_mm", c.sensor_width_mm);
        c.image_width_px = cam->integer("image_width_px", 0);
        c.image_height_px = cam->integer("image_height_px", 0);
        if (auto p = cam->numbers("position_m", 3); !p.empty()) c.position_m = {p[0], p[1], p[2]};
        c.yaw_deg = cam->number("yaw_deg", 0);
        c.pitch_deg = cam->number("pitch_deg", 0);
        c.roll_deg = cam->number("roll_deg", 0);
        c.exposure_s = cam->number("exposure_s", c.exposure_s);
        c.near_m = cam->number("near_m", c.near_m);
        c.far_m = cam->number("far_m", c.far_m);
        cam->finish();
        // Validate everything except the image size, which may come from the background.
        checked(cam->key_path(""), [&] {
            CameraModel probe{c.settings(std::max(1, c.image_width_px), std::max(1, c.image_height_px))};
            return 0;
        });
    }

    if (auto rain = r.object("rain")) {
        auto& rc = job.rain;
        const std::string path = rain->key_path("");
        rc.intensity_mm_per_h = rain->number("intensity_mm_per_h", rc.intensity_mm_per_h);
        checked(rain->key_path("intensity_mm_per_h"), [&] { return RainIntensity{rc.intensity_mm_per_h}; });
        const auto wind = rain->numbers("wind_m_per_s", 2);
        auto dir = rain->object("direction");
        if (!wind.empty() && dir) throw config_error(path + ": wind_m_per_s and direction are mutually exclusive");
        if (!wind.empty()) rc.wind = checked(rain->key_path("wind_m_per_s"), [&] { return WindVector{wind[0], wind[1]}; });
        if (dir) {
            rc.slant_deg = dir->number("slant_deg", 0.0);
            rc.azimuth_deg = dir->number("azimuth_deg", 0.0);
            dir->finish();
            rc.wind = checked(dir->key_path(""), [&] { return wind_from_direction(*rc.slant_deg, *rc.azimuth_deg); });
        }
        if (auto range = rain->numbers("diameter_range_mm", 2); !range.empty())
            rc.diameter_range = checked(rain->key_path("diameter_range_mm"), [&] { return DiameterRange::from_mm(range[0], range[1]); });
        rc.count_override = rain->opt_count("count_override");
        const std::string mode = rain->string("count_mode", "round");
        if (mode == "round")
            rc.count_mode = CountMode::round_half_even;
        else if (mode == "poisson")
            rc.count_mode = CountMode::poisson;
        else
            throw config_error(rain->key_path("count_mode") + " must be \"round\" or \"poisson\"");
        if (auto budget = rain->opt_count("particle_budget")) rc.particle_budget = *budget;
        if (auto vol = rain->object("volume_m")) {
            const auto lo = vol->numbers("min", 3), hi = vol->numbers("max", 3);
            if (lo.empty() || hi.empty()) throw config_error(vol->key_path("") + " needs min and max");
            vol->finish();
            rc.volume = checked(vol->key_path(""), [&] { return SimVolume{{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}}; });
        }
        rc.occlusion_epsilon_m = rain->number("occlusion_epsilon_m", rc.occlusion_epsilon_m);
        if (!(rc.occlusion_epsilon_m >= 0.0)) throw config_error(rain->key_path("occlusion_epsilon_m") + " must be >= 0");
        rain->finish();
    }

    if (auto app = r.object("appearance")) {
        auto& ac = job.appearance;
        const std::string mode = app->string("mode", "procedural");
        if (mode == "procedural")
            ac.mode = StreakAppearance::Mode::procedural;
        else if (mode == "database")
            ac.mode = StreakAppearance::Mode::database;
        else
            throw config_error(app->key_path("mode") + " must be \"procedural\" or \"database\"");
        const std::string profile = app->string("profile", "gaussian");
        if (profile == "gaussian")
            ac.procedural.profile = CrossSection::gaussian;
        else if (profile == "flat")
            ac.procedural.profile = CrossSection::flat;
        else
            throw config_error(app->key_path("profile") + " must be \"gaussian\" or \"flat\"");
        ac.procedural.sigma_factor = app->number("sigma_factor", ac.procedural.sigma_factor);
        ac.procedural.intensity = app->number("intensity", ac.procedural.intensity);
        ac.opacity = app->number("opacity", ac.opacity);
        ac.gain = app->number("gain", ac.gain);
        ac.atlas_dir = app->string("atlas_dir", "");
        if (ac.mode == StreakAppearance::Mode::database && ac.atlas_dir.empty())
            throw config_error(app->key_path("atlas_dir") + " is required in database mode");
        app->finish();
        StreakAppearance probe;
        probe.procedural = ac.procedural;
        probe.gain = ac.gain;
        probe.opacity = ac.opacity;
        checked(app->key_path(""), [&] {
            probe.validate();
            return 0;
        });
    }

    if (auto blend = r.object("blend")) {
        job.tau0_s = blend->opt_number("tau0_s");
        if (job.tau0_s && !(*job.tau0_s > 0.0)) throw config_error(blend->key_path("tau0_s") + " must be positive");
        blend->finish();
    }
    r.finish();
    return job;
}

BatchConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    Reader top{doc, ""};
    const int version = top.integer("schema_version", config_schema_version);
    if (version != config_schema_version)
        throw config_error("unsupported schema_version " + std::to_string(version));
    BatchConfig batch;
    batch.output_dir = base_dir / top.string("output_dir", "out");
    json defaults = json::object();
    if (const json* d = top.find("defaults")) {
        if (!d->is_object()) throw config_error("defaults must be an object");
        defaults = *d;
    }
    const json* jobs = top.find("jobs");
    if (!jobs) throw config_error("jobs is required");
    if (!jobs->is_array()) throw config_error("jobs must be an array");
    top.finish();

    std::set<std::string> ids;
    for (std::size_t i = 0; i < jobs->size(); ++i) {
        const std::string where = "jobs[" + std::to_string(i) + "]";
        if (!(*jobs)[i].is_object()) throw config_error(where + " must be an object");
        json merged = defaults;
        merged.merge_patch((*jobs)[i]);
        if (!merged.contains("id")) merged["id"] = "record_" + std::string(4 - std::min<std::size_t>(4, std::to_string(i).size()), '0') + std::to_string(i);
        JobConfig job = parse_job(merged, base_dir, where);
        if (!ids.insert(job.id).second) throw config_error(where + ".id duplicates \"" + job.id + "\"");
        batch.jobs.push_back(std::move(job));
    }
    return batch;
}

BatchConfig load_config(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) throw io_error("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw config_error("cannot parse " + path.string() + ": " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

json job_to_json(const JobConfig& job) {
    json j;
    j["id"] = job.id;
    j["background"] = job.background;
    j["depth"] = job.depth;
    j["depth_format"] = {{"type", job.depth_format.kind == DepthFormat::Kind::pfm ? "pfm" : "png16"},
                         {"depth_scale_m", job.depth_format.depth_scale_m},
                         {"sky_is_max", job.depth_format.sky_is_max}};
    j["transfer"] = job.transfer == Transfer::srgb ? "srgb" : "linear";
    j["seed"] = job.seed;
    const auto& c = job.camera;
    j["camera"] = {{"focal_length_mm", c.focal_length_mm}, {"sensor_width_mm", c.sensor_width_mm},
                   {"image_width_px", c.image_width_px},   {"image_height_px", c.image_height_px},
                   {"position_m", {c.position_m.x, c.position_m.y, c.position_m.z}},
                   {"yaw_deg", c.yaw_deg}, {"pitch_deg", c.pitch_deg}, {"roll_deg", c.roll_deg},
                   {"exposure_s", c.exposure_s}, {"near_m", c.near_m}, {"far_m", c.far_m}};
    const auto& rc = job.rain;
    json rain = {{"intensity_mm_per_h", rc.intensity_mm_per_h},
                 {"wind_m_per_s", {rc.wind.vx(), rc.wind.vz()}},
                 {"diameter_range_mm", {rc.diameter_range.d_min() * 1e3, rc.diameter_range.d_max() * 1e3}},
                 {"count_mode", rc.count_mode == CountMode::poisson ? "poisson" : "round"},
                 {"particle_budget", rc.particle_budget},
                 {"occlusion_epsilon_m", rc.occlusion_epsilon_m}};
    if (rc.count_override) rain["count_override"] = *rc.count_override;
    if (rc.volume) {
        const vec3 lo = rc.volume->min_corner(), hi = rc.volume->max_corner();
        rain["volume_m"] = {{"min", {lo.x, lo.y, lo.z}}, {"max", {hi.x, hi.y, hi.z}}};
    }
    j["rain"] = rain;
    const auto& ac = job.appearance;
    j["appearance"] = {{"mode", ac.mode == StreakAppearance::Mode::procedural ? "procedural" : "database"},
                       {"profile", ac.procedural.profile == CrossSection::gaussian ? "gaussian" : "flat"},
                       {"sigma_factor", ac.procedural.sigma_factor},
                       {"intensity", ac.procedural.intensity},
                       {"opacity", ac.opacity},
                       {"gain", ac.gain}};
    if (!ac.atlas_dir.empty()) j["appearance"]["atlas_dir"] = ac.atlas_dir;
    if (job.tau0_s) j["blend"] = {{"tau0_s", *job.tau0_s}};
    return j;
}

}  // namespace rainforge
