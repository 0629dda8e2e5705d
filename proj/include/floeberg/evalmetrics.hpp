// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floeberg/check.hpp"
#include "floeberg/icechart.hpp"
#include "floeberg/regionloss.hpp"
#include "floeberg/scene.hpp"
#include "floeberg/unet.hpp"

namespace floeberg::evalmetrics {

using Confusion = std::array<std::array<long, 4>, 4>;  // [truth][pred]

struct MetricsReport {
    std::array<double, 4> r2{};
    std::array<bool, 4> defined{};
    long n_poly = 0;
    std::optional<double> pixel_accuracy;
    std::optional<Confusion> confusion;
    long evaluable_pixels = 0;
    int polygons_skipped_empty = 0;  // land-covered, no prediction possible
};

/// Per-class coefficient of determination across polygons:
/// R2_i = 1 - sum_k (Y_ik - P_ik)^2 / sum_k (Y_ik - mean_i)^2.
/// A class whose label variance is below 1e-15 is flagged undefined.
struct R2Result {
    std::array<double, 4> value{};
    std::array<bool, 4> defined{};
};
R2Result r2_per_class(std::span<const icechart::RegionalLabel> labels,
                      std::span<const regionloss::PolygonPrediction> preds);

struct PixelMetrics {
    double accuracy = 0.0;
    Confusion confusion{};
    long total = 0;
};

/// Accuracy and confusion over pixels with truth != 255 and land == 0.
PixelMetrics pixel_metrics(std::span<const std::uint8_t> pred,
                           std::span<const std::uint8_t> truth,
                           std::span<const std::uint8_t> land);

/// Per-pixel argmax with smallest-index tie break. probs: [4, H*W] planes.
template <class T>
std::vector<std::uint8_t> argmax_classes(const T* probs, std::size_t hw) {
    std::vector<std::uint8_t> out(hw);
    for (std::size_t i = 0; i < hw; ++i) {
        int best = 0;
        T bv = probs[i];
        for (int c = 1; c < 4; ++c) {
            const T v = probs[static_cast<std::size_t>(c) * hw + i];
            if (v > bv) {
                bv = v;
                best = c;
            }
        }
        out[i] = static_cast<std::uint8_t>(best);
    }
    return out;
}

/// Whole-scene class probabilities via non-overlapping tiles of size `tile`,
/// reflection-padded at the right/bottom remainder and cropped after
/// stitching. The scene must be at least tile x tile (pad it first if not).
/// Returns [4, H*W] planes.
template <class T>
ad::Tensor<T> predict_scene_probs(unet::UNetParams<T>& net, const scene::Scene& s,
                                  int tile) {
    FLB_REQUIRE(tile >= 16 && tile % 16 == 0, "predict_scene_probs: tile must be a positive multiple of 16");
    FLB_REQUIRE(s.height >= tile && s.width >= tile, "scene ", s.meta.scene_id, " (",
                s.height, "x", s.width, ") is smaller than the ", tile,
                " tile; pad the scene or shrink the tile");
    const int ht = (s.height + tile - 1) / tile;
    const int wt = (s.width + tile - 1) / tile;
    const int hp = ht * tile, wp = wt * tile;

    // Reflected (mirror-without-edge) padded channel planes.
    auto reflect = [](int v, int n) { return v < n ? v : 2 * n - 2 - v; };
    ad::Tensor<T> padded({scene::kNumChannels, hp, wp});
    for (int c = 0; c < scene::kNumChannels; ++c) {
        const float* src = s.channel(c);
        for (int r = 0; r < hp; ++r) {
            const int sr = reflect(r, s.height);
            for (int q = 0; q < wp; ++q)
                padded.at(c, r, q) = static_cast<T>(
                    src[static_cast<std::size_t>(sr) * s.width + reflect(q, s.width)]);
        }
    }

    ad::Tensor<T> probs({4, s.height, s.width});
    for (int tr = 0; tr < ht; ++tr) {
        for (int tc = 0; tc < wt; ++tc) {
            ad::Tensor<T> x({1, scene::kNumChannels, tile, tile});
            for (int c = 0; c < scene::kNumChannels; ++c)
                for (int r = 0; r < tile; ++r)
                    for (int q = 0; q < tile; ++q)
                        x.at(0, c, r, q) = padded.at(c, tr * tile + r, tc * tile + q);
            const auto tile_probs = unet::forward_probs(net, x);
            for (int c = 0; c < 4; ++c)
                for (int r = 0; r < tile; ++r) {
                    const int gr = tr * tile + r;
                    if (gr >= s.height) break;
                    for (int q = 0; q < tile; ++q) {
                        const int gq = tc * tile + q;
                        if (gq >= s.width) break;
                        probs.at(c, gr, gq) = tile_probs.at(0, c, r, q);
                    }
                }
        }
    }
    return probs;
}

/// Full evaluation: tiled inference per scene, polygon aggregation against
/// chart labels pooled across scenes, plus pixel metrics wherever truth
/// planes exist. Scenes must already be normalized like the training data.
template <class T>
MetricsReport evaluate(unet::UNetParams<T>& net, std::span<const scene::Scene> scenes,
                       int tile) {
    FLB_REQUIRE(!scenes.empty(), "evaluate: empty scene list");
    std::vector<icechart::RegionalLabel> labels;
    std::vector<regionloss::PolygonPrediction> preds;
    MetricsReport report;
    double correct = 0.0;
    long evaluable = 0;
    Confusion confusion{};
    bool any_truth = false;

    for (const auto& s : scenes) {
        const auto probs = predict_scene_probs(net, s, tile);
        const std::size_t hw = s.plane_size();
        for (const auto& [id, entry] : s.chart.entries) {
            if (!entry) continue;
            bool present = false;
            for (std::size_t i = 0; i < hw && !present; ++i)
                present = s.polygon_map[i] == id;
            if (!present) continue;
            const auto agg = regionloss::aggregate_polygon(
                probs.data(), hw, s.polygon_map.data(), s.land_mask.data(), id);
            if (!agg) {
                ++report.polygons_skipped_empty;
                continue;
            }
            labels.push_back(*entry);
            preds.push_back(*agg);
        }
        if (s.truth) {
            any_truth = true;
            const auto pred_map = argmax_classes(probs.data(), hw);
            const auto pm = pixel_metrics(pred_map, *s.truth, s.land_mask);
            correct += pm.accuracy * static_cast<double>(pm.total);
            evaluable += pm.total;
            for (int a = 0; a < 4; ++a)
                for (int p = 0; p < 4; ++p)
                    confusion[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)] +=
                        pm.confusion[static_cast<std::size_t>(a)][static_cast<std::size_t>(p)];
        }
    }

    FLB_REQUIRE(!labels.empty(), "evaluate: no usable polygons in the scene list");
    const auto r2 = r2_per_class(labels, preds);
    report.r2 = r2.value;
    report.defined = r2.defined;
    report.n_poly = static_cast<long>(labels.size());
    if (any_truth) {
        report.pixel_accuracy = evaluable > 0 ? correct / static_cast<double>(evaluable) : 0.0;
        report.confusion = confusion;
        report.evaluable_pixels = evaluable;
    }
    return report;
}

/// Report CSV: one "class,r2,defined" row per class.
std::string report_csv(const MetricsReport& report);

/// Human-readable summary table.
std::string summary_text(const MetricsReport& report, const std::string& title);

}  // namespace floeberg::evalmetrics
