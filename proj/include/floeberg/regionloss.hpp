// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "floeberg/check.hpp"
#include "floeberg/icechart.hpp"
#include "floeberg/tape.hpp"

namespace floeberg::regionloss {

/// Natural-log clamp floor for predicted concentrations/probabilities.
inline constexpr double kLogClampFloor = 1e-7;

/// Mean of the per-pixel class probabilities over one polygon's sea pixels.
struct PolygonPrediction {
    std::array<double, 4> conc{};

    double operator[](int i) const { return conc[static_cast<std::size_t>(i)]; }
};

/// Per-pixel class labels with 255 = ignore.
using PixelLabelMap = std::vector<std::uint8_t>;

/// Region supervision for one image of a batch.
struct RegionItem {
    std::vector<std::int32_t> polygon_map;  // H*W
    std::vector<std::uint8_t> land_mask;    // H*W, 1 = land
    const icechart::ChartTable* chart = nullptr;
};

/// Polygon bookkeeping of one batch loss evaluation.
struct RegionLossStats {
    int polygons_used = 0;
    int polygons_excluded = 0;
    int polygons_empty = 0;  // fully under land after masking
};

namespace detail {

// Deterministic per-image gather: polygon id -> flat pixel indices, ascending
// id order, land removed.
inline std::map<std::int32_t, std::vector<std::int32_t>> gather_polygons(
    const std::int32_t* polygon_map, const std::uint8_t* land_mask, std::size_t n) {
    std::map<std::int32_t, std::vector<std::int32_t>> out;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t id = polygon_map[i];
        if (id < 0) continue;
        auto& bucket = out[id];  // ensure the id is visible even if all-land
        if (!land_mask[i]) bucket.push_back(static_cast<std::int32_t>(i));
    }
    return out;
}

}  // namespace detail

/// Eq.-style aggregation for plain probability planes (no tape): mean of the
/// per-pixel probabilities over the polygon's sea pixels.
/// probs: [4, H*W] row-major planes. Returns nullopt when the polygon has no
/// sea pixels (caller skips it).
template <class T>
std::optional<PolygonPrediction> aggregate_polygon(const T* probs, std::size_t hw,
                                                   const std::int32_t* polygon_map,
                                                   const std::uint8_t* land_mask,
                                                   std::int32_t polygon_id) {
    bool present = false;
    std::array<double, 4> sum{};
    std::size_t count = 0;
    for (std::size_t i = 0; i < hw; ++i) {
        if (polygon_map[i] != polygon_id) continue;
        present = true;
        if (land_mask[i]) continue;
        for (int c = 0; c < 4; ++c)
            sum[static_cast<std::size_t>(c)] += probs[static_cast<std::size_t>(c) * hw + i];
        ++count;
    }
    FLB_REQUIRE(present, "aggregate_polygon: polygon ", polygon_id,
                " does not occur in the polygon map");
    if (count == 0) return std::nullopt;
    PolygonPrediction p;
    for (int c = 0; c < 4; ++c)
        p.conc[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] / static_cast<double>(count);
    return p;
}

/// Cross-entropy between a chart label and an aggregated prediction:
/// -(1/4) * sum_i label_i * ln(clamp(pred_i, 1e-7, 1)).
inline double region_ce(const PolygonPrediction& pred, const icechart::RegionalLabel& label) {
    double loss = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double p = std::min(std::max(pred[i], kLogClampFloor), 1.0);
        loss -= label[i] * std::log(p);
    }
    return loss / 4.0;
}

/// Batch regional loss: per image, per polygon id in ascending order, skip
/// excluded and land-emptied polygons, otherwise add region_ce of the
/// aggregated prediction. Returns the raw sum as a tape scalar.
///
/// probs must be [B, 4, H, W]; items supply per-image maps, masks and charts.
/// A polygon id present in a map but absent from its chart is an error.
template <class T>
ad::Var batch_region_loss(ad::Tape<T>& tape, ad::Var probs,
                          std::vector<RegionItem> items,
                          RegionLossStats* stats = nullptr) {
    const auto& pv = tape.value(probs);
    FLB_REQUIRE(pv.ndim() == 4 && pv.dim(1) == 4,
                "batch_region_loss: probs must be [B,4,H,W]");
    const int batch = pv.dim(0);
    FLB_REQUIRE(static_cast<int>(items.size()) == batch,
                "batch_region_loss: got ", items.size(), " region items for batch ",
                batch);
    const std::size_t hw = static_cast<std::size_t>(pv.dim(2)) * pv.dim(3);
    for (const auto& item : items) {
        FLB_REQUIRE(item.polygon_map.size() == hw && item.land_mask.size() == hw,
                    "batch_region_loss: plane size mismatch");
        FLB_REQUIRE(item.chart != nullptr, "batch_region_loss: missing chart");
    }

    // Forward pass; record per-polygon contributions for the backward closure.
    struct Contribution {
        int image = 0;
        std::array<double, 4> label{};
        std::array<double, 4> pred{};
        std::vector<std::int32_t> pixels;
    };
    auto contribs = std::make_shared<std::vector<Contribution>>();
    RegionLossStats local{};
    double total = 0.0;
    for (int b = 0; b < batch; ++b) {
        const auto polygons = detail::gather_polygons(items[static_cast<std::size_t>(b)].polygon_map.data(),
                                                      items[static_cast<std::size_t>(b)].land_mask.data(), hw);
        const auto& chart = *items[static_cast<std::size_t>(b)].chart;
        const T* planes = pv.data() + static_cast<std::size_t>(b) * 4 * hw;
        for (const auto& [id, pixels] : polygons) {
            const auto it = chart.entries.find(id);
            FLB_REQUIRE(it != chart.entries.end(), "batch_region_loss: polygon ", id,
                        " has no chart entry");
            if (!it->second) {
                ++local.polygons_excluded;  // chart row "id,X": contributes 0
                continue;
            }
            if (pixels.empty()) {
                ++local.polygons_empty;  // fully under land: contributes 0
                continue;
            }
            Contribution c;
            c.image = b;
            c.pixels = pixels;
            const double inv = 1.0 / static_cast<double>(pixels.size());
            for (int cls = 0; cls < 4; ++cls) {
                double s = 0.0;
                const T* plane = planes + static_cast<std::size_t>(cls) * hw;
                for (const std::int32_t px : pixels) s += plane[px];
                c.pred[static_cast<std::size_t>(cls)] = s * inv;
                c.label[static_cast<std::size_t>(cls)] = (*it->second)[cls];
            }
            PolygonPrediction pp;
            pp.conc = c.pred;
            total += region_ce(pp, *it->second);
            ++local.polygons_used;
            contribs->push_back(std::move(c));
        }
    }
    if (stats) *stats = local;

    const int pid = probs.id;
    return tape.make_node(
        ad::Tensor<T>::scalar(static_cast<T>(total)), {probs},
        [pid, contribs, hw](ad::Tape<T>& t, int oid) {
            if (!t.wants_grad(pid)) return;
            const double g = static_cast<double>(t.grad_of(oid)[0]);
            ad::Tensor<T>& gp = t.grad_of(pid);
            for (const auto& c : *contribs) {
                const double inv_n = 1.0 / static_cast<double>(c.pixels.size());
                T* planes = gp.data() + static_cast<std::size_t>(c.image) * 4 * hw;
                for (int cls = 0; cls < 4; ++cls) {
                    const double p = c.pred[static_cast<std::size_t>(cls)];
                    // d/dp of -(1/4) label ln(clamp(p)) is zero in the clamped
                    // region below the floor.
                    if (p < kLogClampFloor || c.label[static_cast<std::size_t>(cls)] == 0.0) continue;
                    const double coeff =
                        g * (-0.25) * c.label[static_cast<std::size_t>(cls)] / p * inv_n;
                    T* plane = planes + static_cast<std::size_t>(cls) * hw;
                    for (const std::int32_t px : c.pixels)
                        plane[px] += static_cast<T>(coeff);
                }
            }
        });
}

/// Plain-value batch loss (no tape); same contract as batch_region_loss.
template <class T>
double batch_region_loss_value(const ad::Tensor<T>& probs,
                               const std::vector<RegionItem>& items,
                               RegionLossStats* stats = nullptr) {
    ad::Tape<T> tape;
    ad::Var v = tape.leaf(probs, false);
    ad::Var loss = batch_region_loss(tape, v, items, stats);
    return static_cast<double>(tape.value(loss)[0]);
}

/// Dominant-polygon pixel labels for the fully supervised baseline: pixels of
/// polygons with a class above the threshold get that class, everything else
/// (mixed, excluded, no polygon) gets 255.
inline PixelLabelMap derive_pixel_labels(const icechart::ChartTable& chart,
                                         const std::vector<std::int32_t>& polygon_map,
                                         double threshold = 0.65) {
    std::map<std::int32_t, std::uint8_t> dominant;
    PixelLabelMap out(polygon_map.size(), 255);
    for (std::size_t i = 0; i < polygon_map.size(); ++i) {
        const std::int32_t id = polygon_map[i];
        if (id < 0) continue;
        auto it = dominant.find(id);
        if (it == dominant.end()) {
            std::uint8_t value = 255;
            const auto entry = chart.entries.find(id);
            if (entry != chart.entries.end() && entry->second) {
                const auto cls = icechart::dominant_class(*entry->second, threshold);
                if (cls) value = static_cast<std::uint8_t>(*cls);
            }
            it = dominant.emplace(id, value).first;
        }
        out[i] = it->second;
    }
    return out;
}

/// Masked per-pixel cross-entropy: mean over pixels with label != 255 and
/// land_mask == 0 of -ln(clamp(p_label, 1e-7, 1)). Returns nullopt when no
/// pixel contributes (caller skips the step).
template <class T>
std::optional<ad::Var> pixel_ce_masked(ad::Tape<T>& tape, ad::Var probs,
                                       std::vector<PixelLabelMap> labels,
                                       std::vector<std::vector<std::uint8_t>> land_masks) {
    const auto& pv = tape.value(probs);
    FLB_REQUIRE(pv.ndim() == 4 && pv.dim(1) == 4, "pixel_ce_masked: probs must be [B,4,H,W]");
    const int batch = pv.dim(0);
    const std::size_t hw = static_cast<std::size_t>(pv.dim(2)) * pv.dim(3);
    FLB_REQUIRE(static_cast<int>(labels.size()) == batch &&
                    static_cast<int>(land_masks.size()) == batch,
                "pixel_ce_masked: batch size mismatch");
    for (int b = 0; b < batch; ++b) {
        FLB_REQUIRE(labels[static_cast<std::size_t>(b)].size() == hw &&
                        land_masks[static_cast<std::size_t>(b)].size() == hw,
                    "pixel_ce_masked: plane size mismatch");
    }

    auto contributing = std::make_shared<std::vector<std::pair<int, std::int32_t>>>();
    double total = 0.0;
    for (int b = 0; b < batch; ++b) {
        const auto& lab = labels[static_cast<std::size_t>(b)];
        const auto& land = land_masks[static_cast<std::size_t>(b)];
        const T* planes = pv.data() + static_cast<std::size_t>(b) * 4 * hw;
        for (std::size_t i = 0; i < hw; ++i) {
            if (lab[i] == 255 || land[i]) continue;
            FLB_REQUIRE(lab[i] < 4, "pixel_ce_masked: label value ", int(lab[i]));
            const double p = std::min(
                std::max(static_cast<double>(planes[static_cast<std::size_t>(lab[i]) * hw + i]),
                         kLogClampFloor),
                1.0);
            total -= std::log(p);
            contributing->emplace_back(b, static_cast<std::int32_t>(i));
        }
    }
    if (contributing->empty()) return std::nullopt;
    const double inv = 1.0 / static_cast<double>(contributing->size());

    const int pid = probs.id;
    auto labels_shared = std::make_shared<std::vector<PixelLabelMap>>(std::move(labels));
    return tape.make_node(
        ad::Tensor<T>::scalar(static_cast<T>(total * inv)), {probs},
        [pid, contributing, labels_shared, inv, hw](ad::Tape<T>& t, int oid) {
            if (!t.wants_grad(pid)) return;
            const double g = static_cast<double>(t.grad_of(oid)[0]);
            const auto& pv2 = t.node_value(pid);
            ad::Tensor<T>& gp = t.grad_of(pid);
            for (const auto& [b, i] : *contributing) {
                const auto cls = (*labels_shared)[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
                const std::size_t off =
                    (static_cast<std::size_t>(b) * 4 + cls) * hw + static_cast<std::size_t>(i);
                const double p = static_cast<double>(pv2[off]);
                if (p < kLogClampFloor) continue;  // clamped region
                gp[off] += static_cast<T>(g * (-inv) / p);
            }
        });
}

}  // namespace floeberg::regionloss
