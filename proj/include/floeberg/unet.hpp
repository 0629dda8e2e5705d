// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "floeberg/check.hpp"
#include "floeberg/rng.hpp"
#include "floeberg/tape.hpp"
#include "floeberg/tensor.hpp"

namespace floeberg::unet {

/// Four-block encoder-decoder. Encoder filters default to [16, 32, 64, 64];
/// the fourth block is the bottleneck (pools after blocks 1-3 only) and the
/// decoder mirrors at [64, 32, 16] before the final 1x1 head.
struct UNetConfig {
    int in_channels = 7;
    int num_classes = 4;
    std::array<int, 4> encoder_filters = {16, 32, 64, 64};
    int kernel = 3;
    std::uint64_t seed = 0;

    void validate() const {
        FLB_REQUIRE(in_channels > 0 && num_classes > 0, "UNetConfig: channels must be positive");
        FLB_REQUIRE(kernel >= 1 && kernel % 2 == 1, "UNetConfig: kernel must be odd");
        for (int f : encoder_filters)
            FLB_REQUIRE(f > 0, "UNetConfig: encoder filters must be positive");
    }
};

namespace detail {

struct LayerShape {
    std::string name;
    std::vector<int> weight;  // conv: [out,in,k,k]; deconv: [in,out,2,2]
    int bias = 0;
};

/// Parameter layout implied by a config, in declaration (= checkpoint) order.
inline std::vector<LayerShape> layer_shapes(const UNetConfig& cfg) {
    cfg.validate();
    const auto& f = cfg.encoder_filters;
    const int k = cfg.kernel;
    std::vector<LayerShape> out;
    auto conv = [&](const std::string& name, int cin, int cout, int ksz) {
        out.push_back({name + ".w", {cout, cin, ksz, ksz}, cout});
    };
    auto deconv = [&](const std::string& name, int cin, int cout) {
        out.push_back({name + ".w", {cin, cout, 2, 2}, cout});
    };
    int cin = cfg.in_channels;
    for (int blk = 0; blk < 4; ++blk) {
        const std::string base = "enc" + std::to_string(blk + 1);
        conv(base + ".conv1", cin, f[static_cast<std::size_t>(blk)], k);
        conv(base + ".conv2", f[static_cast<std::size_t>(blk)], f[static_cast<std::size_t>(blk)], k);
        cin = f[static_cast<std::size_t>(blk)];
    }
    // Decoder: up from the bottleneck through the three skip scales.
    deconv("dec3.up", f[3], f[2]);
    conv("dec3.conv1", f[2] * 2, f[2], k);
    conv("dec3.conv2", f[2], f[2], k);
    deconv("dec2.up", f[2], f[1]);
    conv("dec2.conv1", f[1] * 2, f[1], k);
    conv("dec2.conv2", f[1], f[1], k);
    deconv("dec1.up", f[1], f[0]);
    conv("dec1.conv1", f[0] * 2, f[0], k);
    conv("dec1.conv2", f[0], f[0], k);
    conv("head", f[0], cfg.num_classes, 1);
    return out;
}

}  // namespace detail

template <class T>
struct UNetParams {
    UNetConfig cfg;
    // Weight/bias pairs in declaration order: [w0, b0, w1, b1, ...].
    std::vector<ad::Parameter<T>> params;

    std::size_t count() const {
        std::size_t n = 0;
        for (const auto& p : params) n += p.value.numel();
        return n;
    }
    void zero_grad() {
        for (auto& p : params) p.zero_grad();
    }
    ad::Parameter<T>& at(const std::string& name) {
        for (auto& p : params)
            if (p.name == name) return p;
        fail_arg(msg("UNetParams: no parameter named '", name, "'"));
    }
};

/// Exact parameter total implied by a config.
inline long long param_count(const UNetConfig& cfg) {
    long long n = 0;
    for (const auto& layer : detail::layer_shapes(cfg)) {
        long long w = 1;
        for (int d : layer.weight) w *= d;
        n += w + layer.bias;
    }
    return n;
}

/// Fan-in-scaled normal initialization (std = sqrt(2/fan_in)), biases zero;
/// fully determined by cfg.seed.
template <class T>
UNetParams<T> init_params(const UNetConfig& cfg) {
    UNetParams<T> out;
    out.cfg = cfg;
    PortableRng rng(derive_seed(cfg.seed, kSeedInit));
    for (const auto& layer : detail::layer_shapes(cfg)) {
        ad::Tensor<T> w(layer.weight);
        // Deconv weights are [in,out,2,2]: each output pixel draws from `in`
        // inputs. Conv weights are [out,in,k,k]: fan-in = in*k*k.
        const bool is_deconv = layer.weight[2] == 2 && layer.weight[3] == 2 &&
                               layer.name.find(".up.") != std::string::npos;
        const double fan_in = is_deconv
                                  ? layer.weight[0]
                                  : static_cast<double>(layer.weight[1]) *
                                        layer.weight[2] * layer.weight[3];
        const double std_dev = std::sqrt(2.0 / fan_in);
        for (std::size_t i = 0; i < w.numel(); ++i)
            w[i] = static_cast<T>(rng.normal() * std_dev);
        out.params.emplace_back(layer.name, std::move(w));
        ad::Tensor<T> b({layer.bias});
        std::string bias_name = layer.name;
        bias_name.replace(bias_name.size() - 2, 2, ".b");
        out.params.emplace_back(bias_name, std::move(b));
    }
    return out;
}

/// All-zero parameters (testing hook: forward yields uniform probabilities).
template <class T>
UNetParams<T> zero_params(const UNetConfig& cfg) {
    auto out = init_params<T>(cfg);
    for (auto& p : out.params) p.value.fill(T(0));
    return out;
}

/// Encoder-decoder forward pass to per-pixel class probabilities.
/// x: [B, in_channels, H, W] with H, W divisible by 16 -> [B, num_classes, H, W].
template <class T>
ad::Var forward(ad::Tape<T>& tape, UNetParams<T>& net, ad::Var x) {
    const auto& xv = tape.value(x);
    FLB_REQUIRE(xv.ndim() == 4, "unet::forward: input must be [B,C,H,W]");
    FLB_REQUIRE(xv.dim(1) == net.cfg.in_channels, "unet::forward: expected ",
                net.cfg.in_channels, " input channels, got ", xv.dim(1));
    FLB_REQUIRE(xv.dim(2) % 16 == 0 && xv.dim(3) % 16 == 0,
                "unet::forward: spatial dims must be divisible by 16, got ",
                xv.dim(2), "x", xv.dim(3));

    std::size_t idx = 0;
    auto next = [&]() -> std::pair<ad::Var, ad::Var> {
        ad::Var w = tape.param(net.params[idx]);
        ad::Var b = tape.param(net.params[idx + 1]);
        idx += 2;
        return {w, b};
    };
    auto conv_relu = [&](ad::Var in) {
        auto [w, b] = next();
        return tape.relu(tape.conv2d(in, w, b));
    };

    // Encoder with skip taps after each block's second conv.
    ad::Var e1 = conv_relu(conv_relu(x));
    ad::Var e2 = conv_relu(conv_relu(tape.maxpool2x2(e1)));
    ad::Var e3 = conv_relu(conv_relu(tape.maxpool2x2(e2)));
    ad::Var bottleneck = conv_relu(conv_relu(tape.maxpool2x2(e3)));

    auto up_block = [&](ad::Var in, ad::Var skip) {
        auto [uw, ub] = next();
        ad::Var up = tape.relu(tape.conv_transpose2d(in, uw, ub));
        return conv_relu(conv_relu(tape.concat_channels(up, skip)));
    };
    ad::Var d3 = up_block(bottleneck, e3);
    ad::Var d2 = up_block(d3, e2);
    ad::Var d1 = up_block(d2, e1);

    auto [hw, hb] = next();
    ad::Var logits = tape.conv2d(d1, hw, hb);  // 1x1 head, no activation
    return tape.softmax_channels(logits);
}

/// Convenience: forward without keeping the tape.
template <class T>
ad::Tensor<T> forward_probs(UNetParams<T>& net, const ad::Tensor<T>& x) {
    ad::Tape<T> tape;
    ad::Var probs = forward(tape, net, tape.leaf(x));
    return tape.value(probs);
}

}  // namespace floeberg::unet
