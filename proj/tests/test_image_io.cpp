#include "oracles.hpp"

#include "rainforge/errors.hpp"
#include "rainforge/image_io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <random>

using namespace rainforge;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in{p, std::ios::binary};
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Png, RoundTripAllLayouts) {
    const auto dir = oracle::temp_dir("png");
    std::mt19937_64 gen{1};
    for (int depth : {8, 16})
        for (int channels : {1, 2, 3, 4}) {
            PngImage img;
            img.width = 13;
            img.height = 7;
            img.channels = channels;
            img.bit_depth = depth;
            img.samples.resize(13 * 7 * channels);
            for (auto& s : img.samples) s = static_cast<std::uint16_t>(gen() % (img.max_value() + 1));
            const auto path = dir / ("img" + std::to_string(depth) + "_" + std::to_string(channels) + ".png");
            write_png(path, img);
            const auto back = read_png(path);
            EXPECT_EQ(back.width, 13);
            EXPECT_EQ(back.height, 7);
            EXPECT_EQ(back.channels, channels);
            EXPECT_EQ(back.bit_depth, depth);
            EXPECT_EQ(back.samples, img.samples);
            write_png(dir / "again.png", back);
            EXPECT_EQ(slurp(path), slurp(dir / "again.png"));
        }
}

TEST(Png, Errors) {
    const auto dir = oracle::temp_dir("pngerr");
    EXPECT_THROW(read_png(dir / "missing.png"), io_error);
    std::ofstream(dir / "junk.png") << "definitely not a png";
    EXPECT_THROW(read_png(dir / "junk.png"), decode_error);
    // Truncated file with a valid signature.
    PngImage img{4, 4, 3, 8, std::vector<std::uint16_t>(48, 100)};
    write_png(dir / "ok.png", img);
    const auto bytes = slurp(dir / "ok.png");
    std::ofstream(dir / "cut.png", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
    EXPECT_THROW(read_png(dir / "cut.png"), decode_error);
}

TEST(Pfm, RoundTripWithInfinity) {
    const auto dir = oracle::temp_dir("pfm");
    for (int channels : {1, 3}) {
        PfmImage img{5, 3, channels, {}};
        for (int i = 0; i < 15 * channels; ++i) img.data.push_back(0.25f * i);
        img.data[2] = INFINITY;
        write_pfm(dir / "x.pfm", img);
        const auto back = read_pfm(dir / "x.pfm");
        EXPECT_EQ(back.width, 5);
        EXPECT_EQ(back.height, 3);
        EXPECT_EQ(back.channels, channels);
        EXPECT_EQ(back.data, img.data);
    }
}

TEST(Pfm, ReadsBigEndianBottomUp) {
    const auto dir = oracle::temp_dir("pfmbe");
    // 1x2 gray, rows stored bottom-up: bottom = 2.0, top = 1.0.
    std::string bytes = "Pf\n1 2\n1.0\n";
    for (float v : {2.0f, 1.0f}) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<char>((u >> s) & 0xff));
    }
    std::ofstream(dir / "be.pfm", std::ios::binary) << bytes;
    const auto img = read_pfm(dir / "be.pfm");
    ASSERT_EQ(img.data.size(), 2u);
    EXPECT_EQ(img.data[0], 1.0f);
    EXPECT_EQ(img.data[1], 2.0f);
}

TEST(Pfm, Errors) {
    const auto dir = oracle::temp_dir("pfmerr");
    EXPECT_THROW(read_pfm(dir / "missing.pfm"), io_error);
    std::ofstream(dir / "bad.pfm") << "P6\n1 1\n255\n";
    EXPECT_THROW(read_pfm(dir / "bad.pfm"), decode_error);
    std::ofstream(dir / "short.pfm") << "PF\n4 4\n-1.0\nabc";
    EXPECT_THROW(read_pfm(dir / "short.pfm"), decode_error);
}
