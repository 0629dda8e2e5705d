// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#include "floeberg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "floeberg/check.hpp"
#include "floeberg/icechart.hpp"
#include "floeberg/rng.hpp"

namespace floeberg::synthgen {

namespace {

constexpr std::uint64_t kTagVoronoi = 0x564F524Full;
constexpr std::uint64_t kTagField = 0x4649454Cull;
constexpr std::uint64_t kTagChannels = 0x4348414Eull;

// Box blur with a clamped window, applied separately along rows and columns.
void box_blur(std::vector<double>& grid, int h, int w, int radius) {
    if (radius <= 0) return;
    std::vector<double> tmp(grid.size());
    for (int r = 0; r < h; ++r) {
        const double* row = grid.data() + static_cast<std::size_t>(r) * w;
        double* out = tmp.data() + static_cast<std::size_t>(r) * w;
        double acc = 0.0;
        int lo = 0, hi = -1;
        for (int q = 0; q < w; ++q) {
            const int want_lo = std::max(0, q - radius);
            const int want_hi = std::min(w - 1, q + radius);
            while (hi < want_hi) acc += row[++hi];
            while (lo < want_lo) acc -= row[lo++];
            out[q] = acc / static_cast<double>(hi - lo + 1);
        }
    }
    for (int q = 0; q < w; ++q) {
        double acc = 0.0;
        int lo = 0, hi = -1;
        for (int r = 0; r < h; ++r) {
            const int want_lo = std::max(0, r - radius);
            const int want_hi = std::min(h - 1, r + radius);
            while (hi < want_hi) acc += tmp[static_cast<std::size_t>(++hi) * w + q];
            while (lo < want_lo) acc -= tmp[static_cast<std::size_t>(lo++) * w + q];
            grid[static_cast<std::size_t>(r) * w + q] = acc / static_cast<double>(hi - lo + 1);
        }
    }
}

}  // namespace

void SynthConfig::validate() const {
    FLB_REQUIRE(height >= 32 && width >= 32, "SynthConfig: dims must be at least 32");
    FLB_REQUIRE(n_polygon_sites >= 1, "SynthConfig: need at least one polygon site");
    FLB_REQUIRE(n_polygon_sites <= height * width, "SynthConfig: more sites than pixels");
    FLB_REQUIRE(smoothing_radius >= 0, "SynthConfig: negative smoothing radius");
    double prior_sum = 0.0;
    for (double p : class_priors) {
        FLB_REQUIRE(p >= 0.0, "SynthConfig: negative class prior");
        prior_sum += p;
    }
    FLB_REQUIRE(std::abs(prior_sum - 1.0) <= 1e-9, "SynthConfig: priors sum to ",
                prior_sum, ", expected 1");
    for (const auto& row : channel_std)
        for (int c = 0; c < 4; ++c)
            FLB_REQUIRE(row[static_cast<std::size_t>(c)] > 0.0,
                        "SynthConfig: radiometric channel stds must be positive");
    FLB_REQUIRE(land_fraction >= 0.0 && land_fraction <= 0.5,
                "SynthConfig: land fraction outside [0, 0.5]");
    FLB_REQUIRE(month >= 1 && month <= 12, "SynthConfig: month outside [1,12]");
}

SynthConfig preset(std::string_view name) {
    SynthConfig cfg;
    // dB-like backscatter means per class (water, young, FYI, MYI) and
    // brightness-temperature-like values for the passive channels.
    const std::array<std::array<double, 4>, 4> means = {{
        {-25.0, -20.0, -14.0, -8.0},   // hh
        {-32.0, -26.0, -20.0, -13.0},  // hv
        {150.0, 170.0, 200.0, 230.0},  // amsr_h
        {160.0, 185.0, 210.0, 235.0},  // amsr_v
    }};
    for (int cls = 0; cls < 4; ++cls) {
        for (int ch = 0; ch < 4; ++ch)
            cfg.channel_mean[static_cast<std::size_t>(cls)][static_cast<std::size_t>(ch)] =
                means[static_cast<std::size_t>(ch)][static_cast<std::size_t>(cls)];
        for (int ch = 4; ch < scene::kNumChannels; ++ch)
            cfg.channel_mean[static_cast<std::size_t>(cls)][static_cast<std::size_t>(ch)] = 0.0;
    }
    if (name == "separable-v1") {
        cfg.preset_name = "separable-v1";
        for (int cls = 0; cls < 4; ++cls) {
            auto& sd = cfg.channel_std[static_cast<std::size_t>(cls)];
            sd = {2.0, 2.0, 8.0, 8.0, 1.0, 1.0, 1.0};
        }
        cfg.smoothing_radius = 16;
        cfg.n_polygon_sites = 12;
    } else if (name == "mixed-v1") {
        cfg.preset_name = "mixed-v1";
        for (int cls = 0; cls < 4; ++cls) {
            auto& sd = cfg.channel_std[static_cast<std::size_t>(cls)];
            sd = {4.0, 4.0, 16.0, 16.0, 1.0, 1.0, 1.0};
        }
        cfg.smoothing_radius = 10;
        cfg.n_polygon_sites = 14;
    } else {
        fail_arg(msg("unknown preset '", std::string(name),
                     "' (expected separable-v1|mixed-v1)"));
    }
    return cfg;
}

std::vector<std::int32_t> voronoi_from_sites(
    int height, int width, std::span<const std::pair<int, int>> sites) {
    FLB_REQUIRE(height > 0 && width > 0, "voronoi_from_sites: empty grid");
    FLB_REQUIRE(!sites.empty(), "voronoi_from_sites: no sites");
    std::vector<std::int32_t> out(static_cast<std::size_t>(height) * width);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            long best = -1;
            std::int32_t best_id = 0;
            for (std::size_t i = 0; i < sites.size(); ++i) {
                const long dr = r - sites[i].first;
                const long dc = c - sites[i].second;
                const long d = dr * dr + dc * dc;
                if (best < 0 || d < best) {  // strict: ties keep the smaller id
                    best = d;
                    best_id = static_cast<std::int32_t>(i);
                }
            }
            out[static_cast<std::size_t>(r) * width + c] = best_id;
        }
    }
    return out;
}

std::vector<std::int32_t> voronoi_map(int height, int width, int n_sites,
                                      std::uint64_t seed) {
    FLB_REQUIRE(height > 0 && width > 0, "voronoi_map: empty grid");
    FLB_REQUIRE(n_sites >= 1 && n_sites <= height * width,
                "voronoi_map: site count ", n_sites, " out of range");
    PortableRng rng(seed);
    std::vector<std::pair<int, int>> sites;
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(sites.size()) < n_sites) {
        const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(height)));
        const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(width)));
        if (used.insert({r, c}).second) sites.emplace_back(r, c);
    }
    return voronoi_from_sites(height, width, sites);
}

std::vector<std::uint8_t> class_field(int height, int width, const SynthConfig& cfg,
                                      std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = static_cast<std::size_t>(height) * width;
    PortableRng rng(seed);

    // Per-class smoothed noise, flattened to exact uniforms by rank, then
    // tilted: argmax_c u_c^(1/p_c) picks class c with probability p_c.
    std::vector<std::vector<double>> scores;
    std::vector<int> classes;
    for (int cls = 0; cls < 4; ++cls) {
        const double prior = cfg.class_priors[static_cast<std::size_t>(cls)];
        std::vector<double> field(n);
        for (auto& v : field) v = rng.normal();  // one draw per pixel per class
        if (prior <= 0.0) continue;
        box_blur(field, height, width, cfg.smoothing_radius);
        box_blur(field, height, width, cfg.smoothing_radius);
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (field[a] != field[b]) return field[a] < field[b];
            return a < b;
        });
        std::vector<double> score(n);
        const double inv_prior = 1.0 / prior;
        for (std::size_t rank = 0; rank < n; ++rank) {
            const double u = (static_cast<double>(rank) + 0.5) / static_cast<double>(n);
            score[order[rank]] = std::pow(u, inv_prior);
        }
        scores.push_back(std::move(score));
        classes.push_back(cls);
    }

    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.size(); ++c)
            if (scores[c][i] > scores[best][i]) best = c;
        out[i] = static_cast<std::uint8_t>(classes[best]);
    }
    return out;
}

scene::Scene gen_scene(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int h = cfg.height, w = cfg.width;
    const std::size_t n = static_cast<std::size_t>(h) * w;

    scene::Scene s;
    s.height = h;
    s.width = w;
    s.meta.scene_id = msg("scene_", seed);
    s.meta.month = cfg.month;
    s.meta.center_lat = cfg.center_lat;
    s.meta.center_lon = cfg.center_lon;

    s.polygon_map = voronoi_map(h, w, cfg.n_polygon_sites, derive_seed(seed, kTagVoronoi));
    const auto field = class_field(h, w, cfg, derive_seed(seed, kTagField));

    // Border land band along the bottom edge.
    s.land_mask.assign(n, 0);
    const int land_rows = static_cast<int>(std::llround(cfg.land_fraction * h));
    for (int r = h - land_rows; r < h; ++r)
        for (int c = 0; c < w; ++c) s.land_mask[static_cast<std::size_t>(r) * w + c] = 1;

    // Truth carries classes on sea pixels only; land is unlabeled.
    s.truth = std::vector<std::uint8_t>(n);
    for (std::size_t i = 0; i < n; ++i)
        (*s.truth)[i] = s.land_mask[i] ? 255 : field[i];

    // Radiometric channels from per-class Gaussians; land pixels keep the
    // underlying field's signature (terrain radiometry is not modeled).
    s.channels.resize(n * scene::kNumChannels);
    PortableRng chan_rng(derive_seed(seed, kTagChannels));
    for (int ch = 0; ch < 4; ++ch) {
        float* plane = s.channel(ch);
        for (std::size_t i = 0; i < n; ++i) {
            const auto cls = static_cast<std::size_t>(field[i]);
            plane[i] = static_cast<float>(cfg.channel_mean[cls][static_cast<std::size_t>(ch)] +
                                          cfg.channel_std[cls][static_cast<std::size_t>(ch)] *
                                              chan_rng.normal());
        }
    }
    for (int r = 0; r < h; ++r) {
        const float lat = static_cast<float>(
            cfg.center_lat + (0.5 - (r + 0.5) / static_cast<double>(h)) * cfg.lat_span);
        for (int c = 0; c < w; ++c) s.channel(4)[static_cast<std::size_t>(r) * w + c] = lat;
    }
    for (int c = 0; c < w; ++c) {
        const float lon = static_cast<float>(
            cfg.center_lon + ((c + 0.5) / static_cast<double>(w) - 0.5) * cfg.lon_span);
        for (int r = 0; r < h; ++r) s.channel(5)[static_cast<std::size_t>(r) * w + c] = lon;
    }
    const float month_value = static_cast<float>(cfg.month / 12.0);
    std::fill(s.channel(6), s.channel(6) + n, month_value);

    // Chart from the hidden truth: per polygon, class fractions over sea
    // pixels, quantized through the egg-code round trip; fully-landed
    // polygons become excluded rows.
    for (int id = 0; id < cfg.n_polygon_sites; ++id) {
        long counts[4] = {0, 0, 0, 0};
        long total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (s.polygon_map[i] != id || s.land_mask[i]) continue;
            ++counts[field[i]];
            ++total;
        }
        if (total == 0) {
            s.chart.entries[id] = std::nullopt;
            continue;
        }
        std::array<double, 4> frac{};
        for (int c = 0; c < 4; ++c)
            frac[static_cast<std::size_t>(c)] =
                static_cast<double>(counts[c]) / static_cast<double>(total);
        const icechart::RegionalLabel exact(frac);
        s.chart.entries[id] =
            icechart::eggcode_to_label(icechart::label_to_eggcode(exact));
    }

    s.validate();
    return s;
}

void gen_dataset(const SynthConfig& cfg, int n_scenes, std::uint64_t seed,
                 const std::filesystem::path& out_dir) {
    FLB_REQUIRE(n_scenes >= 0, "gen_dataset: negative scene count");
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    const std::uint64_t base = derive_seed(seed, kSeedScenes);
    std::ofstream index(out_dir / "index.txt", std::ios::trunc);
    FLB_CHECK_DATA(index.good(), "cannot write index in ", out_dir.string());
    for (int i = 0; i < n_scenes; ++i) {
        const std::uint64_t scene_seed = splitmix64(base + static_cast<std::uint64_t>(i));
        scene::Scene s = gen_scene(cfg, scene_seed);
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%04d", i);
        s.meta.scene_id = name;
        scene::save_scene(s, out_dir / name);
        index << name << '\n';
    }
}

}  // namespace floeberg::synthgen
