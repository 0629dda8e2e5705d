// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "floeberg/rng.hpp"
#include "floeberg/unet.hpp"

using namespace floeberg;
using ad::Tensor;
using unet::UNetConfig;

namespace {

template <class T>
Tensor<T> random_input(int b, int c, int h, int w, std::uint64_t seed) {
    PortableRng rng(seed);
    Tensor<T> t({b, c, h, w});
    for (std::size_t i = 0; i < t.numel(); ++i)
        t[i] = static_cast<T>(rng.uniform01() * 2.0 - 1.0);
    return t;
}

}  // namespace

TEST_CASE("forward shape and per-pixel simplex") {
    UNetConfig cfg;
    cfg.seed = 3;
    auto net = unet::init_params<float>(cfg);
    const auto x = random_input<float>(2, 7, 64, 64, 1);
    const auto probs = unet::forward_probs(net, x);
    REQUIRE(probs.shape() == std::vector<int>{2, 4, 64, 64});
    const std::size_t hw = 64 * 64;
    for (int i = 0; i < 2; ++i)
        for (std::size_t p = 0; p < hw; ++p) {
            double s = 0.0;
            for (int c = 0; c < 4; ++c) {
                const float v = probs[(static_cast<std::size_t>(i) * 4 + c) * hw + p];
                CHECK(v >= 0.0f);
                s += v;
            }
            CHECK(std::abs(s - 1.0) < 1e-6);
        }
}

TEST_CASE("forward rejects non-divisible spatial dims") {
    UNetConfig cfg;
    auto net = unet::init_params<double>(cfg);
    const auto x = random_input<double>(1, 7, 48, 50, 2);
    ad::Tape<double> tape;
    CHECK_THROWS_WITH_AS(unet::forward(tape, net, tape.leaf(x)),
                         doctest::Contains("divisible by 16"), std::invalid_argument);
    const auto bad_ch = random_input<double>(1, 6, 64, 64, 2);
    ad::Tape<double> tape2;
    CHECK_THROWS_AS(unet::forward(tape2, net, tape2.leaf(bad_ch)), std::invalid_argument);
}

TEST_CASE("zero parameters give uniform probabilities") {
    UNetConfig cfg;
    auto net = unet::zero_params<double>(cfg);
    const auto x = random_input<double>(1, 7, 32, 32, 5);
    const auto probs = unet::forward_probs(net, x);
    for (std::size_t i = 0; i < probs.numel(); ++i)
        CHECK(probs[i] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("forward is bitwise deterministic") {
    UNetConfig cfg;
    cfg.seed = 11;
    auto net = unet::init_params<float>(cfg);
    const auto x = random_input<float>(1, 7, 32, 32, 9);
    const auto a = unet::forward_probs(net, x);
    const auto b = unet::forward_probs(net, x);
    CHECK(a.vec() == b.vec());
}

TEST_CASE("permuting the batch permutes outputs identically") {
    UNetConfig cfg;
    cfg.seed = 4;
    auto net = unet::init_params<float>(cfg);
    const auto a = random_input<float>(1, 7, 32, 32, 21);
    const auto b = random_input<float>(1, 7, 32, 32, 22);
    Tensor<float> ab({2, 7, 32, 32});
    Tensor<float> ba({2, 7, 32, 32});
    const std::size_t item = a.numel();
    std::copy(a.vec().begin(), a.vec().end(), ab.vec().begin());
    std::copy(b.vec().begin(), b.vec().end(), ab.vec().begin() + static_cast<long>(item));
    std::copy(b.vec().begin(), b.vec().end(), ba.vec().begin());
    std::copy(a.vec().begin(), a.vec().end(), ba.vec().begin() + static_cast<long>(item));
    const auto pab = unet::forward_probs(net, ab);
    const auto pba = unet::forward_probs(net, ba);
    const std::size_t out_item = pab.numel() / 2;
    for (std::size_t i = 0; i < out_item; ++i) {
        CHECK(pab[i] == pba[out_item + i]);
        CHECK(pab[out_item + i] == pba[i]);
    }
}

TEST_CASE("init determinism and fan-in scaling") {
    UNetConfig cfg;
    cfg.seed = 77;
    auto a = unet::init_params<double>(cfg);
    auto b = unet::init_params<double>(cfg);
    REQUIRE(a.params.size() == b.params.size());
    for (std::size_t i = 0; i < a.params.size(); ++i)
        CHECK(a.params[i].value.vec() == b.params[i].value.vec());

    cfg.seed = 78;
    auto c = unet::init_params<double>(cfg);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.params.size() && !any_diff; ++i)
        any_diff = a.params[i].value.vec() != c.params[i].value.vec();
    CHECK(any_diff);

    // enc2.conv1 has fan-in 16*3*3: empirical std within 10% of sqrt(2/144).
    const auto& w = a.at("enc2.conv1.w").value;
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < w.numel(); ++i) {
        sum += w[i];
        sq += w[i] * w[i];
    }
    const double mean = sum / static_cast<double>(w.numel());
    const double sd = std::sqrt(sq / static_cast<double>(w.numel()) - mean * mean);
    const double want = std::sqrt(2.0 / 144.0);
    CHECK(sd > 0.9 * want);
    CHECK(sd < 1.1 * want);

    // Biases start at zero.
    const auto& bias = a.at("enc2.conv1.b").value;
    for (std::size_t i = 0; i < bias.numel(); ++i) CHECK(bias[i] == 0.0);
}

TEST_CASE("param_count matches an independent hand count") {
    UNetConfig cfg;
    // Layer-by-layer count with plain arithmetic, kept separate from the
    // shape-builder the implementation uses.
    auto conv = [](long long cin, long long cout, long long k) {
        return cout * cin * k * k + cout;
    };
    auto deconv = [](long long cin, long long cout) { return cin * cout * 4 + cout; };
    long long want = 0;
    want += conv(7, 16, 3) + conv(16, 16, 3);
    want += conv(16, 32, 3) + conv(32, 32, 3);
    want += conv(32, 64, 3) + conv(64, 64, 3);
    want += conv(64, 64, 3) + conv(64, 64, 3);
    want += deconv(64, 64) + conv(128, 64, 3) + conv(64, 64, 3);
    want += deconv(64, 32) + conv(64, 32, 3) + conv(32, 32, 3);
    want += deconv(32, 16) + conv(32, 16, 3) + conv(16, 16, 3);
    want += conv(16, 4, 1);
    CHECK(want == 318692);  // frozen hand count
    CHECK(unet::param_count(cfg) == want);

    auto net = unet::init_params<float>(cfg);
    CHECK(net.count() == static_cast<std::size_t>(want));

    // A 1x1 head from 1 channel to 1 class contributes exactly 2 parameters.
    UNetConfig tiny;
    tiny.in_channels = 1;
    tiny.num_classes = 1;
    tiny.encoder_filters = {1, 1, 1, 1};
    auto tiny_net = unet::init_params<float>(tiny);
    CHECK(tiny_net.at("head.w").value.numel() + tiny_net.at("head.b").value.numel() == 2);
}

TEST_CASE("doubling filters quadruples interior conv weights") {
    UNetConfig cfg;
    UNetConfig doubled;
    doubled.encoder_filters = {32, 64, 128, 128};
    const auto base = unet::detail::layer_shapes(cfg);
    const auto big = unet::detail::layer_shapes(doubled);
    REQUIRE(base.size() == big.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (base[i].name == "enc1.conv1.w" || base[i].name == "head.w")
            continue;  // boundary layers scale by 2, not 4
        long long nb = 1, ng = 1;
        for (int d : base[i].weight) nb *= d;
        for (int d : big[i].weight) ng *= d;
        CHECK(ng == 4 * nb);
    }
}
