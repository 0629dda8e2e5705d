// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floeberg/icechart.hpp"
#include "floeberg/rng.hpp"

namespace floeberg::scene {

inline constexpr int kNumChannels = 7;
inline constexpr std::array<const char*, kNumChannels> kChannelNames = {
    "hh", "hv", "amsr_h", "amsr_v", "lat", "lon", "month"};

struct SceneMeta {
    std::string scene_id;
    int month = 1;  // 1..12
    double center_lat = 0.0;
    double center_lon = 0.0;
};

/// The unit of storage and evaluation: a multi-channel raster with the
/// polygon-id grid, land mask and chart table. Immutable after load.
struct Scene {
    int height = 0;
    int width = 0;
    std::vector<float> channels;            // kNumChannels * H * W, row-major
    std::vector<std::int32_t> polygon_map;  // H * W, -1 = no polygon
    std::vector<std::uint8_t> land_mask;    // H * W, 1 = land
    icechart::ChartTable chart;
    SceneMeta meta;
    std::optional<std::vector<std::uint8_t>> truth;  // class 0-3, 255 = none

    std::size_t plane_size() const {
        return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    }
    float* channel(int c) { return channels.data() + static_cast<std::size_t>(c) * plane_size(); }
    const float* channel(int c) const {
        return channels.data() + static_cast<std::size_t>(c) * plane_size();
    }

    /// Structural invariants: plane sizes, month range, polygon coverage.
    void validate() const;
};

struct Patch {
    int size = 0;
    int row0 = 0, col0 = 0;
    std::vector<float> channels;            // kNumChannels * P * P
    std::vector<std::int32_t> polygon_map;  // P * P
    std::vector<std::uint8_t> land_mask;    // P * P
    const icechart::ChartTable* chart = nullptr;  // parent scene's chart
};

struct ChannelStats {
    std::array<double, kNumChannels> mean{};
    std::array<double, kNumChannels> stddev{};
};

/// Scene directory: manifest.json, one raw little-endian plane per channel
/// (<name>.f32), polygons.i32, land.u8, chart.csv, optional truth.u8.
/// load(save(s)) is bit-exact for scenes whose chart came from a chart file
/// or generator (labels on the tenth grid).
void save_scene(const Scene& s, const std::filesystem::path& dir);
Scene load_scene(const std::filesystem::path& dir);

/// Scenes listed in <dir>/index.txt, loaded in index order.
std::vector<Scene> load_dataset(const std::filesystem::path& dir);

/// Block-reduce by an integer ratio: channels by mean, land by any-land,
/// polygon map (and truth, when present) by majority with smallest-value tie
/// break. Trailing rows/columns that do not fill a block are cropped first.
Scene downscale_scene(const Scene& s, int ratio);

/// Per-channel mean and population standard deviation over the non-land
/// pixels of all scenes.
ChannelStats compute_stats(std::span<const Scene> scenes);

/// Z-score each channel with the given stats; channels with stddev below
/// 1e-12 become all zeros.
Scene normalize(Scene s, const ChannelStats& stats);

/// One uniformly random patch. Candidates containing no pixel of a usable
/// (non-excluded) polygon are resampled up to 10 times, then accepted anyway.
Patch extract_patch(const Scene& s, int size, PortableRng& rng);

/// `count` seeded patches; deterministic in (scene, size, seed, count).
std::vector<Patch> extract_patches(const Scene& s, int size, std::uint64_t seed,
                                   int count);

}  // namespace floeberg::scene
