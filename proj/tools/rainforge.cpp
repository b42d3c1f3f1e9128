// rainforge command-line front end.

#include "rainforge/config.hpp"
#include "rainforge/errors.hpp"
#include "rainforge/pipeline.hpp"
#include "rainforge/synthetic_scene.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int report(const json& manifest) {
    int failed = 0;
    for (const json& rec : manifest["records"]) {
        if (rec["status"] == "ok") {
            std::cout << rec["id"].get<std::string>() << ": ok, " << rec["stats"]["visible_drops"] << " visible of "
                      << rec["stats"]["spawned_drops"] << " drops, coverage " << rec["stats"]["coverage"] << "\n";
        } else {
            ++failed;
            std::cerr << rec["id"].get<std::string>() << ": " << rec["error_kind"].get<std::string>()
                      << " error: " << rec["message"].get<std::string>() << "\n";
        }
    }
    return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physically based rain rendering and paired-dataset generation"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, output_dir;
    rainforge::BatchOptions batch_options;
    unsigned jobs = 1;
    std::uint64_t seed_override = 0;

    auto* render = app.add_subcommand("render", "Render every job in a config and write a manifest");
    render->add_option("--config", config_path, "JSON job configuration")->required()->check(CLI::ExistingFile);
    render->add_option("--jobs", jobs, "Jobs to run concurrently")->check(CLI::PositiveNumber);
    render->add_flag("--fail-fast", batch_options.fail_fast, "Abort the batch on the first failing job");
    render->add_flag("--hdr", batch_options.run.hdr, "Also write the unclamped rainy image as PFM");
    render->add_flag("--export-quads", batch_options.run.export_quads, "Write streak quads as an OBJ mesh");
    render->add_flag("--quads-per-pixel", batch_options.run.quads_per_pixel,
                     "One quad per covered streak pixel instead of one per streak");
    auto* seed_opt = render->add_option("--seed-override", seed_override, "Use this seed for every job");
    render->add_option("--threads", batch_options.run.threads, "Worker threads per job (0: automatic)");

    auto* validate = app.add_subcommand("validate", "Check a config and its input files");
    validate->add_option("--config", config_path, "JSON job configuration")->required()->check(CLI::ExistingFile);

    auto* stats = app.add_subcommand("stats", "Print per-record drop counts and coverage as CSV");
    stats->add_option("--manifest", manifest_path, "Manifest written by render")->required()->check(CLI::ExistingFile);

    auto* reproduce = app.add_subcommand("reproduce", "Regenerate every record of a manifest");
    reproduce->add_option("--manifest", manifest_path, "Manifest written by render")->required()->check(CLI::ExistingFile);
    reproduce->add_option("--output-dir", output_dir, "Directory for the regenerated records")->required();
    reproduce->add_option("--jobs", jobs, "Jobs to run concurrently")->check(CLI::PositiveNumber);

    int scene_width = 2048, scene_height = 1024;
    double scene_intensity = 50.0;
    auto* scene = app.add_subcommand("make-scene", "Write a synthetic street scene and a config to render it");
    scene->add_option("--output-dir", output_dir, "Directory for the scene files")->required();
    scene->add_option("--width", scene_width)->check(CLI::PositiveNumber);
    scene->add_option("--height", scene_height)->check(CLI::PositiveNumber);
    scene->add_option("--intensity", scene_intensity, "Rain intensity in mm/h");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*render) {
            batch_options.parallelism = jobs;
            if (*seed_opt) batch_options.seed_override = seed_override;
            const auto batch = rainforge::load_config(config_path);
            return report(rainforge::run_batch(batch, batch_options));
        }
        if (*validate) {
            const auto batch = rainforge::load_config(config_path);
            const auto problems = rainforge::validate_inputs(batch);
            for (const auto& p : problems) std::cerr << p << "\n";
            if (!problems.empty()) return 1;
            std::cout << "config ok: " << batch.jobs.size() << " job(s)\n";
            return 0;
        }
        if (*stats) {
            std::ifstream in{manifest_path};
            std::cout << rainforge::manifest_stats_csv(json::parse(in));
            return 0;
        }
        if (*reproduce) {
            rainforge::BatchOptions options;
            options.parallelism = jobs;
            return report(rainforge::run_batch(rainforge::batch_from_manifest(manifest_path, output_dir), options));
        }
        if (*scene) {
            rainforge::write_street_scene(output_dir, scene_width, scene_height);
            const json config = {
                {"schema_version", 1},
                {"output_dir", "out"},
                {"jobs",
                 {{{"id", "street"},
                   {"background", "background.png"},
                   {"depth", "depth.pfm"},
                   {"seed", 1},
                   {"rain", {{"intensity_mm_per_h", scene_intensity}, {"wind_m_per_s", {1.5, 0.0}}}}}}}};
            std::ofstream out{fs::path{output_dir} / "config.json"};
            out << config.dump(2) << '\n';
            std::cout << "wrote " << (fs::path{output_dir} / "config.json").string() << "\n";
            return 0;
        }
    } catch (const rainforge::error& e) {
        std::cerr << e.kind() << " error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
