// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "floeberg/gradcheck.hpp"
#include "floeberg/regionloss.hpp"
#include "floeberg/rng.hpp"
#include "floeberg/unet.hpp"

using namespace floeberg;
using ad::Tape;
using ad::Tensor;
using ad::Var;
using icechart::ChartTable;
using icechart::RegionalLabel;
using regionloss::PolygonPrediction;
using regionloss::RegionItem;

namespace {

// Independent reference: double loop over polygons and pixels, recomputing
// membership per pixel. Kept deliberately naive.
template <class T>
double oracle_batch_loss(const Tensor<T>& probs, const std::vector<RegionItem>& items) {
    const int batch = probs.dim(0);
    const std::size_t hw = static_cast<std::size_t>(probs.dim(2)) * probs.dim(3);
    double total = 0.0;
    for (int b = 0; b < batch; ++b) {
        const auto& item = items[static_cast<std::size_t>(b)];
        std::set<std::int32_t> ids(item.polygon_map.begin(), item.polygon_map.end());
        ids.erase(-1);
        for (const std::int32_t id : ids) {
            const auto& entry = item.chart->entries.at(id);
            if (!entry) continue;
            double sums[4] = {0, 0, 0, 0};
            std::size_t count = 0;
            for (std::size_t i = 0; i < hw; ++i) {
                if (item.polygon_map[i] != id || item.land_mask[i]) continue;
                for (int c = 0; c < 4; ++c)
                    sums[c] += static_cast<double>(
                        probs[(static_cast<std::size_t>(b) * 4 + c) * hw + i]);
                ++count;
            }
            if (count == 0) continue;
            double loss = 0.0;
            for (int c = 0; c < 4; ++c) {
                double p = sums[c] / static_cast<double>(count);
                p = std::min(std::max(p, 1e-7), 1.0);
                loss -= (*entry)[c] * std::log(p);
            }
            total += loss / 4.0;
        }
    }
    return total;
}

Tensor<double> random_simplex_probs(int b, int h, int w, PortableRng& rng) {
    Tensor<double> t({b, 4, h, w});
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    for (int i = 0; i < b; ++i)
        for (std::size_t p = 0; p < hw; ++p) {
            double e[4], s = 0.0;
            for (auto& v : e) {
                v = -std::log(1.0 - rng.uniform01() + 1e-300);
                s += v;
            }
            for (int c = 0; c < 4; ++c)
                t[(static_cast<std::size_t>(i) * 4 + c) * hw + p] = e[c] / s;
        }
    return t;
}

RegionalLabel random_tenth_label(PortableRng& rng) {
    int t[4] = {0, 0, 0, 0};
    for (int i = 0; i < 10; ++i) ++t[rng.below(4)];
    return RegionalLabel({t[0] / 10.0, t[1] / 10.0, t[2] / 10.0, t[3] / 10.0});
}

struct RandomCase {
    Tensor<double> probs;
    std::vector<RegionItem> items;
    std::vector<ChartTable> charts;  // stable storage for item pointers
};

RandomCase random_case(PortableRng& rng, int batch, int h, int w, int n_poly) {
    RandomCase rc;
    rc.probs = random_simplex_probs(batch, h, w, rng);
    rc.charts.resize(static_cast<std::size_t>(batch));
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    for (int b = 0; b < batch; ++b) {
        RegionItem item;
        item.polygon_map.resize(hw);
        item.land_mask.resize(hw);
        for (std::size_t i = 0; i < hw; ++i) {
            item.polygon_map[i] =
                static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n_poly) + 1)) - 1;
            item.land_mask[i] = rng.below(6) == 0 ? 1 : 0;
        }
        for (int id = 0; id < n_poly; ++id) {
            if (rng.below(5) == 0)
                rc.charts[static_cast<std::size_t>(b)].entries[id] = std::nullopt;
            else
                rc.charts[static_cast<std::size_t>(b)].entries[id] = random_tenth_label(rng);
        }
        // Occasionally bury one polygon fully under land.
        if (n_poly > 0 && rng.below(3) == 0) {
            for (std::size_t i = 0; i < hw; ++i)
                if (item.polygon_map[i] == 0) item.land_mask[i] = 1;
        }
        rc.items.push_back(std::move(item));
    }
    for (int b = 0; b < batch; ++b)
        rc.items[static_cast<std::size_t>(b)].chart = &rc.charts[static_cast<std::size_t>(b)];
    return rc;
}

}  // namespace

TEST_CASE("aggregate_polygon examples") {
    // Two pixels with identical probability vectors: the mean is that vector.
    const std::size_t hw = 4;
    std::vector<double> probs(4 * hw, 0.0);
    const double vec[4] = {0.4, 0.3, 0.2, 0.1};
    for (int c = 0; c < 4; ++c) {
        probs[static_cast<std::size_t>(c) * hw + 0] = vec[c];
        probs[static_cast<std::size_t>(c) * hw + 1] = vec[c];
    }
    std::vector<std::int32_t> map = {5, 5, -1, -1};
    std::vector<std::uint8_t> land = {0, 0, 0, 0};
    auto p = regionloss::aggregate_polygon(probs.data(), hw, map.data(), land.data(), 5);
    REQUIRE(p.has_value());
    for (int c = 0; c < 4; ++c) CHECK((*p)[c] == doctest::Approx(vec[c]).epsilon(1e-15));

    // Three pixels with class-0 probs (0.7, 0.4, 0.1): Y_0 = 0.4. Full
    // vectors fixed so each column is a distribution.
    std::vector<double> probs3(4 * hw, 0.0);
    const double cols[3][4] = {{0.7, 0.1, 0.1, 0.1}, {0.4, 0.2, 0.2, 0.2}, {0.1, 0.3, 0.3, 0.3}};
    for (int px = 0; px < 3; ++px)
        for (int c = 0; c < 4; ++c)
            probs3[static_cast<std::size_t>(c) * hw + static_cast<std::size_t>(px)] = cols[px][c];
    std::vector<std::int32_t> map3 = {2, 2, 2, -1};
    auto p3 = regionloss::aggregate_polygon(probs3.data(), hw, map3.data(), land.data(), 2);
    REQUIRE(p3.has_value());
    CHECK((*p3)[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK((*p3)[1] == doctest::Approx(0.2).epsilon(1e-15));

    // One of the three pixels under land: mean over the two sea pixels only.
    std::vector<std::uint8_t> land2 = {0, 1, 0, 0};
    auto psea = regionloss::aggregate_polygon(probs3.data(), hw, map3.data(), land2.data(), 2);
    REQUIRE(psea.has_value());
    CHECK((*psea)[0] == doctest::Approx((0.7 + 0.1) / 2).epsilon(1e-15));

    // Fully under land signals the empty condition.
    std::vector<std::uint8_t> all_land = {1, 1, 1, 1};
    CHECK_FALSE(regionloss::aggregate_polygon(probs3.data(), hw, map3.data(),
                                              all_land.data(), 2)
                    .has_value());
    // Absent polygon id violates the precondition.
    CHECK_THROWS_AS(
        regionloss::aggregate_polygon(probs3.data(), hw, map3.data(), land.data(), 9),
        std::invalid_argument);
}

TEST_CASE("region_ce fixtures") {
    PolygonPrediction onehot;
    onehot.conc = {1.0, 0.0, 0.0, 0.0};
    CHECK(regionloss::region_ce(onehot, RegionalLabel({1, 0, 0, 0})) ==
          doctest::Approx(0.0).epsilon(1e-12));

    PolygonPrediction uniform;
    uniform.conc = {0.25, 0.25, 0.25, 0.25};
    CHECK(regionloss::region_ce(uniform, RegionalLabel({0.1, 0.0, 0.7, 0.2})) ==
          doctest::Approx(0.346574).epsilon(1e-5));

    PolygonPrediction skew;
    skew.conc = {0.8, 0.1, 0.05, 0.05};
    CHECK(regionloss::region_ce(skew, RegionalLabel({0.5, 0.5, 0.0, 0.0})) ==
          doctest::Approx(0.315716).epsilon(1e-5));
}

TEST_CASE("region_ce is minimized at the label (Gibbs)") {
    PortableRng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        // Interior label so every log is finite.
        double e[4], s = 0.0;
        for (auto& v : e) {
            v = 0.05 - std::log(1.0 - rng.uniform01() + 1e-300);
            s += v;
        }
        std::array<double, 4> g{};
        for (int c = 0; c < 4; ++c) g[static_cast<std::size_t>(c)] = e[c] / s;
        const RegionalLabel label(g);
        PolygonPrediction at_label;
        at_label.conc = g;
        const double base = regionloss::region_ce(at_label, label);
        for (int probe = 0; probe < 100; ++probe) {
            double f[4], fs = 0.0;
            for (auto& v : f) {
                v = -std::log(1.0 - rng.uniform01() + 1e-300);
                fs += v;
            }
            PolygonPrediction other;
            for (int c = 0; c < 4; ++c) other.conc[static_cast<std::size_t>(c)] = f[c] / fs;
            CHECK(regionloss::region_ce(other, label) >= base - 1e-12);
        }
    }
}

TEST_CASE("batch_region_loss fixtures") {
    PortableRng rng(42);
    // Batch whose every polygon is excluded: loss 0.
    {
        auto rc = random_case(rng, 2, 8, 8, 3);
        for (auto& chart : rc.charts)
            for (auto& [id, entry] : chart.entries) entry = std::nullopt;
        regionloss::RegionLossStats stats;
        const double loss = regionloss::batch_region_loss_value(rc.probs, rc.items, &stats);
        CHECK(loss == 0.0);
        CHECK(stats.polygons_used == 0);
        CHECK(stats.polygons_excluded > 0);
    }
    // Single image, single polygon: equals region_ce of that polygon.
    {
        Tensor<double> probs = random_simplex_probs(1, 4, 4, rng);
        RegionItem item;
        item.polygon_map.assign(16, 0);
        item.land_mask.assign(16, 0);
        ChartTable chart;
        const RegionalLabel label({0.1, 0.0, 0.7, 0.2});
        chart.entries[0] = label;
        item.chart = &chart;
        const double loss = regionloss::batch_region_loss_value(probs, {item});
        const auto agg = regionloss::aggregate_polygon(probs.data(), 16,
                                                       item.polygon_map.data(),
                                                       item.land_mask.data(), 0);
        CHECK(loss == doctest::Approx(regionloss::region_ce(*agg, label)).epsilon(1e-15));
    }
    // Polygon id missing from the chart is an error.
    {
        auto rc = random_case(rng, 1, 6, 6, 2);
        rc.charts[0].entries.erase(1);
        if (std::find(rc.items[0].polygon_map.begin(), rc.items[0].polygon_map.end(), 1) ==
            rc.items[0].polygon_map.end())
            rc.items[0].polygon_map[0] = 1;
        CHECK_THROWS_AS(regionloss::batch_region_loss_value(rc.probs, rc.items),
                        std::invalid_argument);
    }
}

TEST_CASE("batch_region_loss equals the brute-force oracle on random batches") {
    PortableRng rng(2024);
    for (int inst = 0; inst < 50; ++inst) {
        const int batch = 1 + static_cast<int>(rng.below(2));
        const int h = 4 + static_cast<int>(rng.below(29));
        const int w = 4 + static_cast<int>(rng.below(29));
        const int n_poly = 1 + static_cast<int>(rng.below(10));
        auto rc = random_case(rng, batch, h, w, n_poly);
        const double got = regionloss::batch_region_loss_value(rc.probs, rc.items);
        const double want = oracle_batch_loss(rc.probs, rc.items);
        CHECK(std::abs(got - want) <= 1e-12);
    }
}

TEST_CASE("batch_region_loss is invariant to batch order and polygon relabeling") {
    PortableRng rng(43);
    auto rc = random_case(rng, 2, 12, 12, 6);
    const double base = regionloss::batch_region_loss_value(rc.probs, rc.items);

    // Swap batch order.
    {
        Tensor<double> swapped(rc.probs.shape());
        const std::size_t item_sz = rc.probs.numel() / 2;
        std::copy(rc.probs.vec().begin() + static_cast<long>(item_sz),
                  rc.probs.vec().end(), swapped.vec().begin());
        std::copy(rc.probs.vec().begin(),
                  rc.probs.vec().begin() + static_cast<long>(item_sz),
                  swapped.vec().begin() + static_cast<long>(item_sz));
        std::vector<RegionItem> items = {rc.items[1], rc.items[0]};
        CHECK(std::abs(regionloss::batch_region_loss_value(swapped, items) - base) <= 1e-12);
    }
    // Relabel polygon ids (reverses enumeration order).
    {
        auto rc2 = random_case(rng, 2, 12, 12, 6);  // rebuild, then relabel rc into rc2
        rc2.probs = rc.probs;
        for (int b = 0; b < 2; ++b) {
            auto& item = rc2.items[static_cast<std::size_t>(b)];
            item.polygon_map = rc.items[static_cast<std::size_t>(b)].polygon_map;
            item.land_mask = rc.items[static_cast<std::size_t>(b)].land_mask;
            for (auto& id : item.polygon_map)
                if (id >= 0) id = 97 - id;
            rc2.charts[static_cast<std::size_t>(b)].entries.clear();
            for (const auto& [id, entry] :
                 rc.charts[static_cast<std::size_t>(b)].entries)
                rc2.charts[static_cast<std::size_t>(b)].entries[97 - id] = entry;
        }
        CHECK(std::abs(regionloss::batch_region_loss_value(rc2.probs, rc2.items) - base) <=
              1e-12);
    }
}

TEST_CASE("duplicating every pixel of a polygon leaves the aggregate unchanged") {
    PortableRng rng(44);
    const auto probs = random_simplex_probs(1, 4, 6, rng);
    std::vector<std::int32_t> map(24);
    std::vector<std::uint8_t> land(24, 0);
    for (std::size_t i = 0; i < 24; ++i) map[i] = i < 8 ? 0 : -1;
    const auto base =
        regionloss::aggregate_polygon(probs.data(), 24, map.data(), land.data(), 0);

    // Double the area with the same contents.
    Tensor<double> wide({1, 4, 4, 12});
    std::vector<std::int32_t> map2(48, -1);
    std::vector<std::uint8_t> land2(48, 0);
    for (int c = 0; c < 4; ++c)
        for (std::size_t i = 0; i < 8; ++i) {
            wide[static_cast<std::size_t>(c) * 48 + i] = probs[static_cast<std::size_t>(c) * 24 + i];
            wide[static_cast<std::size_t>(c) * 48 + 24 + i] = probs[static_cast<std::size_t>(c) * 24 + i];
            map2[i] = 0;
            map2[24 + i] = 0;
        }
    const auto doubled =
        regionloss::aggregate_polygon(wide.data(), 48, map2.data(), land2.data(), 0);
    REQUIRE(base.has_value());
    REQUIRE(doubled.has_value());
    for (int c = 0; c < 4; ++c)
        CHECK((*doubled)[c] == doctest::Approx((*base)[c]).epsilon(1e-14));
}

TEST_CASE("derive_pixel_labels fixtures") {
    ChartTable chart;
    chart.entries[0] = RegionalLabel({0.1, 0.0, 0.7, 0.2});  // dominant FYI
    chart.entries[1] = RegionalLabel({0.5, 0.5, 0.0, 0.0});  // mixed
    chart.entries[2] = std::nullopt;                          // excluded
    std::vector<std::int32_t> map = {0, 0, 1, 1, 2, 2, -1, -1};
    const auto labels = regionloss::derive_pixel_labels(chart, map, 0.65);
    CHECK(labels[0] == 2);
    CHECK(labels[1] == 2);
    CHECK(labels[2] == 255);
    CHECK(labels[3] == 255);
    CHECK(labels[4] == 255);
    CHECK(labels[5] == 255);
    CHECK(labels[6] == 255);
    CHECK(labels[7] == 255);
}

TEST_CASE("pixel_ce_masked fixtures") {
    // Perfect one-hot predictions on all labeled pixels: loss 0.
    {
        Tensor<double> probs({1, 4, 2, 2});
        const std::size_t hw = 4;
        std::vector<std::uint8_t> labels = {0, 1, 2, 3};
        for (std::size_t i = 0; i < hw; ++i)
            probs[static_cast<std::size_t>(labels[i]) * hw + i] = 1.0;
        Tape<double> t;
        auto loss = regionloss::pixel_ce_masked(
            t, t.leaf(probs), {labels}, {std::vector<std::uint8_t>(4, 0)});
        REQUIRE(loss.has_value());
        CHECK(t.value(*loss)[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
    // Uniform predictions: ln 4.
    {
        Tensor<double> probs = Tensor<double>::full({1, 4, 2, 2}, 0.25);
        Tape<double> t;
        auto loss = regionloss::pixel_ce_masked(
            t, t.leaf(probs), {std::vector<std::uint8_t>{0, 1, 2, 3}},
            {std::vector<std::uint8_t>(4, 0)});
        REQUIRE(loss.has_value());
        CHECK(t.value(*loss)[0] == doctest::Approx(1.386294).epsilon(1e-5));
    }
    // Two pixels with correct-class probabilities (0.5, 0.8).
    {
        Tensor<double> probs = Tensor<double>::full({1, 4, 1, 2}, 0.1);
        probs.at(0, 0, 0, 0) = 0.5;
        probs.at(0, 1, 0, 1) = 0.8;
        Tape<double> t;
        auto loss = regionloss::pixel_ce_masked(t, t.leaf(probs),
                                                {std::vector<std::uint8_t>{0, 1}},
                                                {std::vector<std::uint8_t>(2, 0)});
        REQUIRE(loss.has_value());
        CHECK(t.value(*loss)[0] == doctest::Approx(0.458145).epsilon(1e-5));
    }
    // All pixels masked out: empty condition.
    {
        Tensor<double> probs = Tensor<double>::full({1, 4, 1, 2}, 0.25);
        Tape<double> t;
        auto loss = regionloss::pixel_ce_masked(t, t.leaf(probs),
                                                {std::vector<std::uint8_t>{255, 255}},
                                                {std::vector<std::uint8_t>(2, 0)});
        CHECK_FALSE(loss.has_value());
        // Land masking alone also empties the batch.
        Tape<double> t2;
        auto loss2 = regionloss::pixel_ce_masked(t2, t2.leaf(probs),
                                                 {std::vector<std::uint8_t>{0, 1}},
                                                 {std::vector<std::uint8_t>{1, 1}});
        CHECK_FALSE(loss2.has_value());
    }
}

TEST_CASE("region loss gradient through softmax passes finite differences") {
    PortableRng rng(45);
    for (int inst = 0; inst < 5; ++inst) {
        auto rc = random_case(rng, 1, 8, 8, 4);
        Tensor<double> logits({1, 4, 8, 8});
        for (std::size_t i = 0; i < logits.numel(); ++i)
            logits[i] = rng.uniform01() * 2.0 - 1.0;
        auto items = rc.items;
        auto rep = ad::grad_check<double>(
            [&](Tape<double>& t, Var v) {
                return regionloss::batch_region_loss(t, t.softmax_channels(v), items);
            },
            logits, 1e-4, 1e-5);
        CHECK(rep.ok);
    }
}

TEST_CASE("pixel CE gradient passes finite differences") {
    PortableRng rng(46);
    Tensor<double> logits({1, 4, 4, 4});
    for (std::size_t i = 0; i < logits.numel(); ++i)
        logits[i] = rng.uniform01() * 2.0 - 1.0;
    std::vector<std::uint8_t> labels(16);
    std::vector<std::uint8_t> land(16, 0);
    for (std::size_t i = 0; i < 16; ++i)
        labels[i] = rng.below(5) == 4 ? 255 : static_cast<std::uint8_t>(rng.below(4));
    land[3] = 1;
    auto rep = ad::grad_check<double>(
        [&](Tape<double>& t, Var v) {
            auto loss = regionloss::pixel_ce_masked(t, t.softmax_channels(v), {labels}, {land});
            REQUIRE(loss.has_value());
            return *loss;
        },
        logits, 1e-4, 1e-5);
    CHECK(rep.ok);
}

TEST_CASE("U-Net with regional loss passes the end-to-end gradient check") {
    unet::UNetConfig cfg;
    cfg.seed = 5;
    auto net = unet::init_params<double>(cfg);

    PortableRng rng(47);
    Tensor<double> x({1, 7, 16, 16});
    for (std::size_t i = 0; i < x.numel(); ++i) x[i] = rng.uniform01() * 2.0 - 1.0;
    RegionItem item;
    item.polygon_map.resize(256);
    item.land_mask.resize(256);
    for (std::size_t i = 0; i < 256; ++i) {
        item.polygon_map[i] = static_cast<std::int32_t>(rng.below(4)) - 1;
        item.land_mask[i] = rng.below(8) == 0 ? 1 : 0;
    }
    ChartTable chart;
    chart.entries[0] = RegionalLabel({0.1, 0.0, 0.7, 0.2});
    chart.entries[1] = RegionalLabel({0.5, 0.2, 0.2, 0.1});
    chart.entries[2] = std::nullopt;
    item.chart = &chart;

    auto loss_value = [&]() {
        ad::Tape<double> t;
        auto probs = unet::forward(t, net, t.leaf(x));
        auto loss = regionloss::batch_region_loss(t, probs, {item});
        return static_cast<double>(t.value(loss)[0]);
    };
    // Analytic gradients.
    net.zero_grad();
    {
        ad::Tape<double> t;
        auto probs = unet::forward(t, net, t.leaf(x));
        auto loss = regionloss::batch_region_loss(t, probs, {item});
        t.backward(loss);
    }
    // 20 sampled parameter coordinates vs central differences.
    const double h = 1e-5;
    PortableRng pick(48);
    double max_rel = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
        auto& p = net.params[pick.below(net.params.size())];
        if (p.value.numel() == 0) continue;
        const std::size_t i = pick.below(p.value.numel());
        const double orig = p.value[i];
        p.value[i] = orig + h;
        const double fp = loss_value();
        p.value[i] = orig - h;
        const double fm = loss_value();
        p.value[i] = orig;
        const double numeric = (fp - fm) / (2.0 * h);
        const double analytic = p.grad[i];
        const double denom = std::max(std::abs(analytic), std::abs(numeric));
        if (denom < 1e-10) continue;
        max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    }
    CHECK(max_rel < 1e-3);
}
