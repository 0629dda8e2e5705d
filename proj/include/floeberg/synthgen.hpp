// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "floeberg/scene.hpp"

namespace floeberg::synthgen {

/// Generator settings. Channel means/stds are per class for the four
/// radiometric channels (hh, hv, amsr_h, amsr_v); lat/lon are deterministic
/// gradients and the month channel is month/12, so their per-class entries
/// are ignored.
struct SynthConfig {
    int height = 128;
    int width = 128;
    int n_polygon_sites = 12;
    int smoothing_radius = 8;
    std::array<double, 4> class_priors = {0.25, 0.25, 0.25, 0.25};
    std::array<std::array<double, scene::kNumChannels>, 4> channel_mean{};
    std::array<std::array<double, scene::kNumChannels>, 4> channel_std{};
    double land_fraction = 0.08;
    int month = 3;
    double center_lat = 72.0;
    double center_lon = -60.0;
    double lat_span = 2.0;
    double lon_span = 4.0;
    std::string preset_name = "custom";

    void validate() const;
};

/// Named presets: "separable-v1" (adjacent class means at least 3 combined
/// stds apart on hh/hv, generous smoothing) and "mixed-v1" (same means,
/// doubled stds, small smoothing radius, so a large share of polygons has no
/// dominant class).
SynthConfig preset(std::string_view name);

/// Nearest-site partition for explicit (row, col) sites: each pixel takes the
/// id (= site index) of the Euclidean-nearest site; ties go to the smallest id.
std::vector<std::int32_t> voronoi_from_sites(
    int height, int width, std::span<const std::pair<int, int>> sites);

/// Same partition over n_sites distinct random sites drawn from the seed.
std::vector<std::int32_t> voronoi_map(int height, int width, int n_sites,
                                      std::uint64_t seed);

/// Spatially coherent class truth: one smoothed noise field per class with a
/// positive prior, rank-flattened to uniform and tilted as u^(1/prior) so the
/// per-pixel argmax selects each class with probability equal to its prior.
std::vector<std::uint8_t> class_field(int height, int width, const SynthConfig& cfg,
                                      std::uint64_t seed);

/// One full scene with hidden truth: class field, Voronoi polygons, per-class
/// Gaussian channels, border land band, chart computed from the truth over
/// sea pixels (polygons fully under land become excluded rows).
scene::Scene gen_scene(const SynthConfig& cfg, std::uint64_t seed);

/// n_scenes scene directories plus index.txt; per-scene seeds derive from the
/// master seed, so the whole tree is byte-reproducible.
void gen_dataset(const SynthConfig& cfg, int n_scenes, std::uint64_t seed,
                 const std::filesystem::path& out_dir);

}  // namespace floeberg::synthgen
