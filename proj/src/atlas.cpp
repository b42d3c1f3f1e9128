#include "rainforge/errors.hpp"
#include "rainforge/image_io.hpp"
#include "rainforge/streak.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace rainforge {

StreakAtlas load_streak_atlas(const std::filesystem::path& dir) {
    const auto index_path = dir / "index.json";
    std::ifstream in{index_path};
    if (!in) throw io_error("cannot open streak atlas index " + index_path.string());
    nlohmann::json index;
    try {
        index = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw decode_error("malformed streak atlas index " + index_path.string() + ": " + e.what());
    }
    if (!index.is_object() || !index.contains("entries") || !index["entries"].is_array())
        throw config_error("streak atlas index needs an \"entries\" array");

    StreakAtlas atlas;
    for (const auto& item : index["entries"]) {
        if (!item.is_object() || !item.contains("texture_path") || !item.contains("length_px") ||
            !item.contains("width_px"))
            throw config_error("streak atlas entries need texture_path, length_px and width_px");
        AtlasEntry e;
        e.length_px = item["length_px"].get<double>();
        e.width_px = item["width_px"].get<double>();
        const PngImage tex = read_png(dir / item["texture_path"].get<std::string>());
        if (tex.channels != 2 && tex.channels != 4)
            throw decode_error("streak texture must be gray+alpha or RGBA");
        e.tex_width = tex.width;
        e.tex_height = tex.height;
        const auto n = static_cast<std::size_t>(tex.width) * tex.height;
        e.gray.resize(n);
        e.alpha.resize(n);
        const double scale = 1.0 / tex.max_value();
        for (std::size_t i = 0; i < n; ++i) {
            const int x = static_cast<int>(i % tex.width), y = static_cast<int>(i / tex.width);
            double g = tex.at(x, y, 0);
            if (tex.channels == 4) g = 0.2126 * tex.at(x, y, 0) + 0.7152 * tex.at(x, y, 1) + 0.0722 * tex.at(x, y, 2);
            e.gray[i] = static_cast<float>(g * scale);
            e.alpha[i] = static_cast<float>(tex.at(x, y, tex.channels - 1) * scale);
        }
        atlas.entries.push_back(std::move(e));
    }
    return atlas;
}

}  // namespace rainforge
