#pragma once

// On-disk scenes and batch configs for pipeline-level tests.

#include "oracles.hpp"

#include "rainforge/config.hpp"
#include "rainforge/synthetic_scene.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace fixtures {

// Writes the synthetic street scene into <root>/scene and returns root.
inline std::filesystem::path scene_root(const std::string& name, int w, int h) {
    const auto root = oracle::temp_dir(name);
    std::filesystem::create_directories(root / "scene");
    rainforge::write_street_scene(root / "scene", w, h);
    return root;
}

// Config skeleton whose defaults point at the scene written by scene_root.
inline nlohmann::json base_config(double far_m = 8.0) {
    return {{"schema_version", 1},
            {"output_dir", "out"},
            {"defaults",
             {{"background", "scene/background.png"},
              {"depth", "scene/depth.pfm"},
              {"seed", 3},
              {"camera", {{"far_m", far_m}}},
              {"rain", {{"wind_m_per_s", {1.0, -0.5}}}}}},
            {"jobs", nlohmann::json::array()}};
}

inline std::filesystem::path write_config(const std::filesystem::path& root, const nlohmann::json& doc,
                                          const std::string& name = "config.json") {
    const auto path = root / name;
    std::ofstream{path} << doc.dump(2);
    return path;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in{p, std::ios::binary};
    return {std::istreambuf_iterator<char>(in), {}};
}

// Every regular file under dir, relative path -> bytes.
inline std::map<std::string, std::string> tree(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

}  // namespace fixtures
