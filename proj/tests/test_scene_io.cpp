// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "floeberg/rng.hpp"
#include "floeberg/scene.hpp"

using namespace floeberg;
using scene::Scene;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("floeberg_test_" + std::to_string(PortableRng(
                                       std::random_device{}()).u64()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

// Random scene whose chart lives on the tenth grid (as all real charts do).
Scene random_scene(int h, int w, int n_poly, std::uint64_t seed) {
    PortableRng rng(seed);
    Scene s;
    s.height = h;
    s.width = w;
    s.meta.scene_id = "test_scene";
    s.meta.month = 1 + static_cast<int>(rng.below(12));
    s.meta.center_lat = 71.25;
    s.meta.center_lon = -52.5;
    const std::size_t n = s.plane_size();
    s.channels.resize(n * scene::kNumChannels);
    for (auto& v : s.channels) v = static_cast<float>(rng.uniform01() * 20.0 - 30.0);
    s.polygon_map.resize(n);
    for (auto& v : s.polygon_map)
        v = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n_poly) + 1)) - 1;
    s.land_mask.resize(n);
    for (auto& v : s.land_mask) v = rng.below(8) == 0 ? 1 : 0;
    for (int id = 0; id < n_poly; ++id) {
        if (rng.below(6) == 0) {
            s.chart.entries[id] = std::nullopt;
            continue;
        }
        const int ct = static_cast<int>(rng.below(11));
        const int ca = ct == 0 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(ct) + 1));
        const int cb = ct - ca;
        s.chart.entries[id] = icechart::eggcode_to_label(icechart::EggCode(
            ct, ca, cb, 0, icechart::StageEntry(static_cast<int>(rng.below(3)) + 1),
            icechart::StageEntry(static_cast<int>(rng.below(3)) + 1),
            icechart::StageEntry(0)));
    }
    if (rng.below(2)) {
        s.truth = std::vector<std::uint8_t>(n);
        for (auto& v : *s.truth)
            v = rng.below(5) == 4 ? 255 : static_cast<std::uint8_t>(rng.below(4));
    }
    return s;
}

bool scenes_equal(const Scene& a, const Scene& b) {
    return a.height == b.height && a.width == b.width && a.channels == b.channels &&
           a.polygon_map == b.polygon_map && a.land_mask == b.land_mask &&
           a.chart.entries == b.chart.entries && a.meta.scene_id == b.meta.scene_id &&
           a.meta.month == b.meta.month && a.meta.center_lat == b.meta.center_lat &&
           a.meta.center_lon == b.meta.center_lon && a.truth == b.truth;
}

}  // namespace

TEST_CASE("save/load round trip is bit-exact on randomized scenes") {
    TempDir tmp;
    for (int i = 0; i < 6; ++i) {
        const Scene s = random_scene(17 + i * 3, 23 + i, 5 + i, 1000 + i);
        const fs::path dir = tmp.path / ("s" + std::to_string(i));
        scene::save_scene(s, dir);
        const Scene loaded = scene::load_scene(dir);
        CHECK(scenes_equal(s, loaded));
    }
}

TEST_CASE("load_scene names the defect") {
    TempDir tmp;
    const Scene s = random_scene(16, 16, 3, 7);
    scene::save_scene(s, tmp.path / "ok");

    // Truncated plane -> "plane size mismatch: hh".
    fs::copy(tmp.path / "ok", tmp.path / "bad_plane", fs::copy_options::recursive);
    {
        std::ofstream trunc(tmp.path / "bad_plane" / "hh.f32",
                            std::ios::binary | std::ios::trunc);
        std::vector<float> short_plane(16 * 16 - 1, 0.f);
        trunc.write(reinterpret_cast<const char*>(short_plane.data()),
                    static_cast<std::streamsize>(short_plane.size() * sizeof(float)));
    }
    CHECK_THROWS_WITH_AS(scene::load_scene(tmp.path / "bad_plane"),
                         doctest::Contains("plane size mismatch: hh"),
                         std::runtime_error);

    // Bad version.
    fs::copy(tmp.path / "ok", tmp.path / "bad_version", fs::copy_options::recursive);
    {
        std::ifstream in(tmp.path / "bad_version" / "manifest.json");
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        in.close();
        auto pos = text.find("\"version\": 1");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 12, "\"version\": 9");
        std::ofstream out(tmp.path / "bad_version" / "manifest.json", std::ios::trunc);
        out << text;
    }
    CHECK_THROWS_WITH_AS(scene::load_scene(tmp.path / "bad_version"),
                         doctest::Contains("version"), std::runtime_error);

    // Missing plane file.
    fs::copy(tmp.path / "ok", tmp.path / "missing", fs::copy_options::recursive);
    fs::remove(tmp.path / "missing" / "polygons.i32");
    CHECK_THROWS_AS(scene::load_scene(tmp.path / "missing"), std::runtime_error);

    // Polygon id missing from the chart.
    Scene orphan = random_scene(8, 8, 2, 9);
    orphan.polygon_map[5] = 12;
    CHECK_THROWS_WITH_AS(scene::save_scene(orphan, tmp.path / "orphan"),
                         doctest::Contains("unreferenced polygon 12"),
                         std::runtime_error);
}

TEST_CASE("downscale_scene block semantics") {
    Scene s = random_scene(4, 4, 3, 11);
    // Constant channel stays constant.
    for (std::size_t i = 0; i < s.plane_size(); ++i) s.channel(0)[i] = 5.5f;
    // Known 2x2 block on channel 1.
    s.channel(1)[0] = 1.f;
    s.channel(1)[1] = 2.f;
    s.channel(1)[4] = 3.f;
    s.channel(1)[5] = 4.f;
    // Polygon majority block [[3,3],[5,7]] -> 3 (then chart needs ids 3,5,7).
    s.polygon_map.assign(16, 0);
    s.polygon_map[0] = 3;
    s.polygon_map[1] = 3;
    s.polygon_map[4] = 5;
    s.polygon_map[5] = 7;
    s.chart.entries.clear();
    for (int id : {0, 3, 5, 7}) s.chart.entries[id] = icechart::RegionalLabel();
    // Tie block [[0,0],[9,9]] -> smallest id 0.
    s.polygon_map[2] = 0;
    s.polygon_map[3] = 0;
    s.polygon_map[6] = 9;
    s.polygon_map[7] = 9;
    s.chart.entries[9] = icechart::RegionalLabel();
    // Land: any land pixel in block marks the block.
    s.land_mask.assign(16, 0);
    s.land_mask[10] = 1;
    s.truth.reset();

    const Scene d = scene::downscale_scene(s, 2);
    CHECK(d.height == 2);
    CHECK(d.width == 2);
    CHECK(d.channels.size() == 4 * scene::kNumChannels);
    CHECK(d.channel(0)[0] == doctest::Approx(5.5));
    CHECK(d.channel(1)[0] == doctest::Approx(2.5));
    CHECK(d.polygon_map[0] == 3);
    CHECK(d.polygon_map[1] == 0);
    CHECK(d.land_mask[3] == 1);
    CHECK(d.land_mask[1] == 0);

    CHECK_THROWS_AS(scene::downscale_scene(s, 0), std::invalid_argument);
    CHECK_THROWS_AS(scene::downscale_scene(s, 99), std::invalid_argument);

    // Non-divisible dims crop the bottom/right remainder.
    const Scene s2 = random_scene(17, 19, 2, 12);
    const Scene d2 = scene::downscale_scene(s2, 5);
    CHECK(d2.height == 3);
    CHECK(d2.width == 3);
}

TEST_CASE("downscale preserves spatial factor and channel count on random scenes") {
    for (int i = 0; i < 4; ++i) {
        const Scene s = random_scene(24, 36, 4, 200 + i);
        const int r = 2 + i;
        const Scene d = scene::downscale_scene(s, r);
        CHECK(d.height == 24 / r);
        CHECK(d.width == 36 / r);
        CHECK(d.channels.size() == d.plane_size() * scene::kNumChannels);
    }
}

TEST_CASE("compute_stats examples") {
    Scene s = random_scene(4, 4, 2, 13);
    s.land_mask.assign(16, 1);
    s.land_mask[0] = 0;
    s.land_mask[1] = 0;
    for (int c = 0; c < scene::kNumChannels; ++c) {
        s.channel(c)[0] = 5.f;
        s.channel(c)[1] = 5.f;
    }
    std::vector<Scene> scenes{s};
    auto stats = scene::compute_stats(scenes);
    CHECK(stats.mean[0] == doctest::Approx(5.0));
    CHECK(stats.stddev[0] == doctest::Approx(0.0));

    // Two values {1,3}: mean 2, population std 1.
    scenes[0].channel(2)[0] = 1.f;
    scenes[0].channel(2)[1] = 3.f;
    stats = scene::compute_stats(scenes);
    CHECK(stats.mean[2] == doctest::Approx(2.0));
    CHECK(stats.stddev[2] == doctest::Approx(1.0));

    // All-land input is an error.
    scenes[0].land_mask.assign(16, 1);
    CHECK_THROWS_AS(scene::compute_stats(scenes), std::invalid_argument);
    CHECK_THROWS_AS(scene::compute_stats(std::span<const Scene>{}),
                    std::invalid_argument);
}

TEST_CASE("normalize examples and invariant") {
    Scene s = random_scene(128, 128, 4, 14);
    std::vector<Scene> scenes{s};
    const auto stats = scene::compute_stats(scenes);
    const Scene n = scene::normalize(s, stats);

    // Constant channel (std 0 guard) -> zeros. Build one explicitly.
    Scene c = s;
    for (std::size_t i = 0; i < c.plane_size(); ++i) c.channel(3)[i] = 0.25f;
    std::vector<Scene> cs{c};
    const auto cstats = scene::compute_stats(cs);
    const Scene cn = scene::normalize(c, cstats);
    for (std::size_t i = 0; i < cn.plane_size(); ++i) CHECK(cn.channel(3)[i] == 0.0f);

    // (7 - 5) / 2 = 1.
    scene::ChannelStats manual;
    manual.mean.fill(5.0);
    manual.stddev.fill(2.0);
    Scene v = s;
    v.channel(0)[0] = 7.0f;
    const Scene vn = scene::normalize(v, manual);
    CHECK(vn.channel(0)[0] == doctest::Approx(1.0));

    // Post-normalization non-land mean ~0, std ~1 per channel.
    std::vector<Scene> ns{n};
    const auto post = scene::compute_stats(ns);
    for (int ch = 0; ch < scene::kNumChannels; ++ch) {
        if (stats.stddev[static_cast<std::size_t>(ch)] <= 1e-6) continue;
        CHECK(std::abs(post.mean[static_cast<std::size_t>(ch)]) < 1e-9);
        CHECK(post.stddev[static_cast<std::size_t>(ch)] == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("extract_patches determinism and placement") {
    const Scene s = random_scene(48, 64, 6, 15);

    // Single placement when the patch covers the scene.
    const Scene square = random_scene(32, 32, 3, 16);
    const auto only = scene::extract_patches(square, 32, 5, 1);
    REQUIRE(only.size() == 1);
    CHECK(only[0].row0 == 0);
    CHECK(only[0].col0 == 0);

    // Identical seeds give identical origin sequences.
    const auto a = scene::extract_patches(s, 16, 123, 20);
    const auto b = scene::extract_patches(s, 16, 123, 20);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].row0 == b[i].row0);
        CHECK(a[i].col0 == b[i].col0);
        CHECK(a[i].channels == b[i].channels);
    }

    // Patch contents match the scene window.
    const auto& p = a[0];
    for (int r = 0; r < 16; ++r)
        for (int q = 0; q < 16; ++q) {
            CHECK(p.polygon_map[static_cast<std::size_t>(r) * 16 + q] ==
                  s.polygon_map[(static_cast<std::size_t>(p.row0) + r) * 64 + p.col0 + q]);
            CHECK(p.channels[static_cast<std::size_t>(r) * 16 + q] ==
                  s.channels[(static_cast<std::size_t>(p.row0) + r) * 64 + p.col0 + q]);
        }
    CHECK(p.chart == &s.chart);

    CHECK_THROWS_AS(scene::extract_patches(s, 65, 1, 1), std::invalid_argument);
}

TEST_CASE("patch rejection avoids excluded-only regions") {
    // Left half carries only an excluded polygon; right half a usable one.
    Scene s;
    s.height = 32;
    s.width = 64;
    s.meta.scene_id = "split";
    s.meta.month = 6;
    const std::size_t n = s.plane_size();
    s.channels.assign(n * scene::kNumChannels, 0.f);
    s.land_mask.assign(n, 0);
    s.polygon_map.resize(n);
    for (int r = 0; r < 32; ++r)
        for (int q = 0; q < 64; ++q)
            s.polygon_map[static_cast<std::size_t>(r) * 64 + q] = q < 32 ? 0 : 1;
    s.chart.entries[0] = std::nullopt;  // excluded
    s.chart.entries[1] = icechart::RegionalLabel();

    PortableRng rng(77);
    int hits_right = 0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        const auto p = scene::extract_patch(s, 32, rng);
        if (p.col0 + 32 > 32) ++hits_right;  // intersects the usable half
    }
    // A patch origin lands fully in the excluded half with probability 1/33
    // per try; surviving 10 rejections has probability (1/33)^10.
    CHECK(hits_right == draws);
}
