// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "floeberg/check.hpp"
#include "floeberg/evalmetrics.hpp"
#include "floeberg/kernels.hpp"
#include "floeberg/regionloss.hpp"
#include "floeberg/rng.hpp"
#include "floeberg/scene.hpp"
#include "floeberg/unet.hpp"

namespace floeberg::trainer {

enum class Mode { weak, baseline };

inline const char* mode_name(Mode m) { return m == Mode::weak ? "weak" : "baseline"; }
inline Mode mode_from_name(const std::string& s) {
    if (s == "weak") return Mode::weak;
    if (s == "baseline") return Mode::baseline;
    fail_arg(msg("unknown mode '", s, "' (expected weak|baseline)"));
}

struct TrainConfig {
    double lr_max = 0.001;
    double momentum = 0.9;
    double weight_decay = 0.01;
    int batch_size = 16;
    int iterations_per_epoch = 500;
    int epochs = 50;
    double restart_t0_epochs = 50.0;
    double eta_min = 0.0;
    int patch_size = 256;
    int downscale_ratio = 10;
    int val_scenes = -1;  // -1 = auto (~1/6 of the dataset), 0 = no validation
    std::uint64_t seed = 0;
    Mode mode = Mode::weak;
    bool deterministic = false;  // pin the scalar kernel backend
    unet::UNetConfig net;

    void validate() const {
        FLB_REQUIRE(lr_max > 0 && eta_min >= 0 && eta_min <= lr_max,
                    "TrainConfig: need 0 <= eta_min <= lr_max");
        FLB_REQUIRE(momentum >= 0 && momentum < 1, "TrainConfig: momentum outside [0,1)");
        FLB_REQUIRE(weight_decay >= 0, "TrainConfig: negative weight decay");
        FLB_REQUIRE(batch_size > 0 && iterations_per_epoch > 0 && epochs >= 0,
                    "TrainConfig: non-positive loop bounds");
        FLB_REQUIRE(restart_t0_epochs > 0, "TrainConfig: non-positive restart period");
        FLB_REQUIRE(patch_size >= 16 && patch_size % 16 == 0,
                    "TrainConfig: patch size must be a positive multiple of 16");
        FLB_REQUIRE(downscale_ratio >= 1, "TrainConfig: downscale ratio must be >= 1");
        net.validate();
    }
};

/// Cosine annealing with warm restarts of constant cycle length t0:
/// lr(t) = eta_min + (lr_max - eta_min)/2 * (1 + cos(pi * t / t0)), t in
/// completed epochs since the cycle start; t = k*t0 evaluates the cycle end
/// (eta_min), after which the next cycle restarts at lr_max.
inline double cosine_lr(double t, double t0, double lr_max, double eta_min) {
    FLB_REQUIRE(t0 > 0, "cosine_lr: non-positive cycle length");
    FLB_REQUIRE(t >= 0, "cosine_lr: negative time");
    double pos = std::fmod(t, t0);
    if (pos == 0.0 && t > 0.0) pos = t0;
    return eta_min + 0.5 * (lr_max - eta_min) * (1.0 + std::cos(std::numbers::pi * pos / t0));
}

template <class T>
struct OptimizerState {
    std::vector<ad::Tensor<T>> velocity;  // one buffer per parameter

    static OptimizerState zeros_like(const unet::UNetParams<T>& params) {
        OptimizerState s;
        s.velocity.reserve(params.params.size());
        for (const auto& p : params.params) s.velocity.emplace_back(p.value.shape());
        return s;
    }
};

/// One SGDM step over all parameters using their accumulated gradients:
/// v <- momentum*v + (g + weight_decay*w); w <- w - lr*v.
template <class T>
void sgdm_step(unet::UNetParams<T>& params, OptimizerState<T>& state, double lr,
               double momentum, double weight_decay) {
    FLB_REQUIRE(state.velocity.size() == params.params.size(),
                "sgdm_step: optimizer state does not match parameters");
    const auto& K = kern::ops<T>();
    for (std::size_t i = 0; i < params.params.size(); ++i) {
        auto& p = params.params[i];
        auto& v = state.velocity[i];
        FLB_REQUIRE(v.same_shape(p.value), "sgdm_step: velocity shape mismatch for ", p.name);
        K.sgdm_update(p.value.numel(), p.value.data(), p.grad.data(), v.data(),
                      static_cast<T>(lr), static_cast<T>(momentum),
                      static_cast<T>(weight_decay));
    }
}

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> val;
};

/// Seeded train/val split over n scenes: Fisher-Yates shuffle from the run
/// seed, validation scenes first. val_scenes < 0 selects ~1/6 of the dataset
/// (at least one scene, leaving at least one for training); 0 disables
/// validation.
inline SplitIndices split_dataset(std::size_t n, std::uint64_t seed, int val_scenes) {
    FLB_REQUIRE(n > 0, "split_dataset: empty dataset");
    int val_count = val_scenes;
    if (val_count < 0)
        val_count = n >= 2 ? std::clamp(static_cast<int>(n) / 6, 1, static_cast<int>(n) - 1) : 0;
    FLB_REQUIRE(val_count < static_cast<int>(n), "split_dataset: validation split (",
                val_count, ") must leave at least one training scene");
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    PortableRng rng(derive_seed(seed, kSeedSplit));
    for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    SplitIndices out;
    out.val.assign(order.begin(), order.begin() + val_count);
    out.train.assign(order.begin() + val_count, order.end());
    return out;
}

struct EpochVal {
    std::array<double, 4> r2{};
    std::array<bool, 4> defined{};
    long n_poly = 0;
    std::optional<double> pixel_accuracy;
};

struct History {
    std::vector<double> iter_loss;
    std::vector<double> iter_lr;
    std::vector<std::uint64_t> iter_sample_hash;
    std::vector<std::uint8_t> iter_stepped;
    std::vector<double> epoch_lr;
    std::vector<EpochVal> val;
};

namespace detail {

inline void to_json(nlohmann::json& j, const unet::UNetConfig& cfg) {
    j = nlohmann::json{{"in_channels", cfg.in_channels},
                       {"num_classes", cfg.num_classes},
                       {"encoder_filters", cfg.encoder_filters},
                       {"kernel", cfg.kernel},
                       {"seed", cfg.seed}};
}

inline unet::UNetConfig unet_config_from_json(const nlohmann::json& j) {
    unet::UNetConfig cfg;
    cfg.in_channels = j.at("in_channels").get<int>();
    cfg.num_classes = j.at("num_classes").get<int>();
    const auto filters = j.at("encoder_filters").get<std::vector<int>>();
    FLB_CHECK_DATA(filters.size() == 4, "checkpoint: encoder filter list must have 4 entries");
    std::copy(filters.begin(), filters.end(), cfg.encoder_filters.begin());
    cfg.kernel = j.at("kernel").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

inline nlohmann::json config_to_json(const TrainConfig& cfg) {
    nlohmann::json net;
    to_json(net, cfg.net);
    return nlohmann::json{{"lr_max", cfg.lr_max},
                          {"momentum", cfg.momentum},
                          {"weight_decay", cfg.weight_decay},
                          {"batch_size", cfg.batch_size},
                          {"iterations_per_epoch", cfg.iterations_per_epoch},
                          {"epochs", cfg.epochs},
                          {"restart_t0_epochs", cfg.restart_t0_epochs},
                          {"eta_min", cfg.eta_min},
                          {"patch_size", cfg.patch_size},
                          {"downscale_ratio", cfg.downscale_ratio},
                          {"val_scenes", cfg.val_scenes},
                          {"seed", cfg.seed},
                          {"mode", mode_name(cfg.mode)},
                          {"deterministic", cfg.deterministic},
                          {"net", net}};
}

inline TrainConfig config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.lr_max = j.at("lr_max").get<double>();
    cfg.momentum = j.at("momentum").get<double>();
    cfg.weight_decay = j.at("weight_decay").get<double>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.iterations_per_epoch = j.at("iterations_per_epoch").get<int>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.restart_t0_epochs = j.at("restart_t0_epochs").get<double>();
    cfg.eta_min = j.at("eta_min").get<double>();
    cfg.patch_size = j.at("patch_size").get<int>();
    cfg.downscale_ratio = j.at("downscale_ratio").get<int>();
    cfg.val_scenes = j.at("val_scenes").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.mode = mode_from_name(j.at("mode").get<std::string>());
    cfg.deterministic = j.at("deterministic").get<bool>();
    cfg.net = unet_config_from_json(j.at("net"));
    return cfg;
}

}  // namespace detail

inline constexpr char kCheckpointMagic[8] = {'F', 'L', 'O', 'E', 'B', 'R', 'G', '1'};

template <class T>
struct LoadedCheckpoint {
    TrainConfig cfg;
    unet::UNetParams<T> params;
    OptimizerState<T> state;
    scene::ChannelStats stats;
    int epochs_completed = 0;
    std::string rng_state;
};

/// Checkpoint: 8-byte magic, u64 manifest length, JSON manifest (config echo,
/// shapes, channel stats, RNG state), then raw little-endian f64 parameter
/// planes followed by velocity planes, both in declaration order.
template <class T>
void save_checkpoint(const unet::UNetParams<T>& params, const OptimizerState<T>& state,
                     const TrainConfig& cfg, const scene::ChannelStats& stats,
                     int epochs_completed, const std::string& rng_state,
                     const std::filesystem::path& path) {
    nlohmann::json manifest;
    manifest["version"] = 1;
    manifest["config"] = detail::config_to_json(cfg);
    manifest["epochs_completed"] = epochs_completed;
    manifest["stats_mean"] = stats.mean;
    manifest["stats_std"] = stats.stddev;
    manifest["rng"] = rng_state;
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& p : params.params)
        shapes.push_back({{"name", p.name}, {"shape", p.value.shape()}});
    manifest["params"] = shapes;
    const std::string text = manifest.dump();

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    FLB_CHECK_DATA(os.good(), "cannot write checkpoint ", path.string());
    os.write(kCheckpointMagic, 8);
    const std::uint64_t len = text.size();
    os.write(reinterpret_cast<const char*>(&len), 8);
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    auto write_plane = [&os](const ad::Tensor<T>& t) {
        std::vector<double> plane(t.numel());
        for (std::size_t i = 0; i < t.numel(); ++i) plane[i] = static_cast<double>(t[i]);
        os.write(reinterpret_cast<const char*>(plane.data()),
                 static_cast<std::streamsize>(plane.size() * sizeof(double)));
    };
    for (const auto& p : params.params) write_plane(p.value);
    for (const auto& v : state.velocity) write_plane(v);
    FLB_CHECK_DATA(os.good(), "write failed: ", path.string());
}

template <class T>
LoadedCheckpoint<T> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    FLB_CHECK_DATA(is.good(), "cannot open checkpoint ", path.string());
    char magic[8];
    is.read(magic, 8);
    FLB_CHECK_DATA(is.good() && std::equal(magic, magic + 8, kCheckpointMagic),
                   "bad checkpoint magic in ", path.string());
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), 8);
    FLB_CHECK_DATA(is.good(), "truncated checkpoint ", path.string());
    std::string text(len, '\0');
    is.read(text.data(), static_cast<std::streamsize>(len));
    FLB_CHECK_DATA(is.good(), "truncated checkpoint manifest in ", path.string());

    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail_data(msg("bad checkpoint manifest: ", e.what()));
    }
    FLB_CHECK_DATA(manifest.value("version", -1) == 1, "unsupported checkpoint version");

    LoadedCheckpoint<T> out;
    out.cfg = detail::config_from_json(manifest.at("config"));
    out.epochs_completed = manifest.at("epochs_completed").get<int>();
    out.rng_state = manifest.at("rng").get<std::string>();
    const auto mean = manifest.at("stats_mean").get<std::vector<double>>();
    const auto sd = manifest.at("stats_std").get<std::vector<double>>();
    FLB_CHECK_DATA(mean.size() == scene::kNumChannels && sd.size() == scene::kNumChannels,
                   "checkpoint stats have wrong channel count");
    std::copy(mean.begin(), mean.end(), out.stats.mean.begin());
    std::copy(sd.begin(), sd.end(), out.stats.stddev.begin());

    out.params = unet::init_params<T>(out.cfg.net);
    const auto& shapes = manifest.at("params");
    FLB_CHECK_DATA(shapes.size() == out.params.params.size(),
                   "checkpoint parameter count mismatch: manifest has ", shapes.size(),
                   ", config implies ", out.params.params.size());
    for (std::size_t i = 0; i < out.params.params.size(); ++i) {
        const auto& entry = shapes[i];
        FLB_CHECK_DATA(entry.at("name").get<std::string>() == out.params.params[i].name,
                       "checkpoint parameter order mismatch at index ", i);
        FLB_CHECK_DATA(entry.at("shape").get<std::vector<int>>() ==
                           out.params.params[i].value.shape(),
                       "checkpoint shape mismatch for ", out.params.params[i].name);
    }
    out.state = OptimizerState<T>::zeros_like(out.params);
    auto read_plane = [&is, &path](ad::Tensor<T>& t) {
        std::vector<double> plane(t.numel());
        is.read(reinterpret_cast<char*>(plane.data()),
                static_cast<std::streamsize>(plane.size() * sizeof(double)));
        FLB_CHECK_DATA(is.good(), "truncated checkpoint planes in ", path.string());
        for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(plane[i]);
    };
    for (auto& p : out.params.params) read_plane(p.value);
    for (auto& v : out.state.velocity) read_plane(v);
    return out;
}

/// The training loop: seeded train/val split, per-iteration patch batches,
/// forward, mode-dependent loss, backward, SGDM with the cosine schedule.
/// Deterministic for a fixed (dataset, config); `deterministic` additionally
/// pins the scalar kernel backend so runs reproduce across microarchitectures.
template <class T>
class Trainer {
public:
    Trainer(std::vector<scene::Scene> dataset, TrainConfig cfg)
        : cfg_(std::move(cfg)), data_rng_(derive_seed(cfg_.seed, kSeedData)) {
        cfg_.validate();
        FLB_REQUIRE(!dataset.empty(), "train: empty dataset");
        if (cfg_.downscale_ratio > 1)
            for (auto& s : dataset) s = scene::downscale_scene(s, cfg_.downscale_ratio);
        for (const auto& s : dataset)
            FLB_REQUIRE(s.height >= cfg_.patch_size && s.width >= cfg_.patch_size,
                        "train: scene ", s.meta.scene_id, " is smaller than the patch size");

        // Seeded split, validation scenes first in the shuffled order.
        const auto split = split_dataset(dataset.size(), cfg_.seed, cfg_.val_scenes);
        val_indices_ = split.val;
        train_indices_ = split.train;

        std::vector<scene::Scene> train_scenes;
        for (int i : train_indices_) train_scenes.push_back(dataset[static_cast<std::size_t>(i)]);
        stats_ = scene::compute_stats(train_scenes);
        scenes_.reserve(dataset.size());
        for (auto& s : dataset) scenes_.push_back(scene::normalize(std::move(s), stats_));

        check_usable_polygons();
        unet::UNetConfig net_cfg = cfg_.net;
        net_cfg.seed = cfg_.seed;  // one run seed drives init, split and sampling
        net_ = unet::init_params<T>(net_cfg);
        opt_ = OptimizerState<T>::zeros_like(net_);
    }

    const TrainConfig& config() const { return cfg_; }
    unet::UNetParams<T>& params() { return net_; }
    const History& history() const { return history_; }
    const scene::ChannelStats& stats() const { return stats_; }
    const std::vector<int>& train_indices() const { return train_indices_; }
    const std::vector<int>& val_indices() const { return val_indices_; }
    int epochs_completed() const { return epochs_completed_; }

    std::vector<const scene::Scene*> val_scenes() const {
        std::vector<const scene::Scene*> out;
        for (int i : val_indices_) out.push_back(&scenes_[static_cast<std::size_t>(i)]);
        return out;
    }

    /// Run the remaining epochs of cfg.epochs.
    void run() { run_epochs(cfg_.epochs - epochs_completed_); }

    void run_epochs(int count) {
        struct IsaGuard {
            kern::Isa prev = kern::active_isa();
            bool engaged = false;
            ~IsaGuard() {
                if (engaged) kern::force_isa(prev);
            }
        } guard;
        if (cfg_.deterministic && kern::active_isa() != kern::Isa::scalar) {
            guard.engaged = true;
            kern::force_isa(kern::Isa::scalar);
        }
        for (int e = 0; e < count; ++e) {
            const int epoch = epochs_completed_;
            history_.epoch_lr.push_back(schedule(epoch, 0));
            for (int it = 0; it < cfg_.iterations_per_epoch; ++it) iteration(epoch, it);
            ++epochs_completed_;
            if (!val_indices_.empty()) history_.val.push_back(validate());
        }
    }

    EpochVal validate() {
        std::vector<scene::Scene> vals;
        for (int i : val_indices_) vals.push_back(scenes_[static_cast<std::size_t>(i)]);
        const auto report = evalmetrics::evaluate(net_, std::span<const scene::Scene>(vals),
                                                  cfg_.patch_size);
        EpochVal v;
        v.r2 = report.r2;
        v.defined = report.defined;
        v.n_poly = report.n_poly;
        v.pixel_accuracy = report.pixel_accuracy;
        return v;
    }

    void save(const std::filesystem::path& path) const {
        save_checkpoint(net_, opt_, cfg_, stats_, epochs_completed_,
                        data_rng_.save_state(), path);
    }

    /// Resume from a checkpoint; `dataset` must be the run's original dataset.
    static Trainer load(const std::filesystem::path& path,
                        std::vector<scene::Scene> dataset) {
        auto ck = load_checkpoint<T>(path);
        Trainer t(std::move(dataset), ck.cfg);
        t.net_ = std::move(ck.params);
        t.opt_ = std::move(ck.state);
        t.epochs_completed_ = ck.epochs_completed;
        t.data_rng_.restore_state(ck.rng_state);
        return t;
    }

private:
    double schedule(int epoch, int it) const {
        const double t = epoch + static_cast<double>(it) / cfg_.iterations_per_epoch;
        return cosine_lr(t, cfg_.restart_t0_epochs, cfg_.lr_max, cfg_.eta_min);
    }

    void check_usable_polygons() const {
        for (int idx : train_indices_) {
            const auto& s = scenes_[static_cast<std::size_t>(idx)];
            for (std::size_t i = 0; i < s.plane_size(); ++i) {
                const auto id = s.polygon_map[i];
                if (id < 0 || s.land_mask[i]) continue;
                const auto it = s.chart.entries.find(id);
                if (it != s.chart.entries.end() && it->second) return;
            }
        }
        fail_arg("train: no usable (non-excluded, non-land) polygon in the training split");
    }

    void iteration(int epoch, int it) {
        const double lr = schedule(epoch, it);
        const int ps = cfg_.patch_size;
        const std::size_t pp = static_cast<std::size_t>(ps) * ps;

        ad::Tensor<T> x({cfg_.batch_size, scene::kNumChannels, ps, ps});
        std::vector<regionloss::RegionItem> items;
        std::vector<regionloss::PixelLabelMap> labels;
        std::vector<std::vector<std::uint8_t>> masks;
        std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
        auto mix = [&hash](std::uint64_t v) {
            for (int byte = 0; byte < 8; ++byte) {
                hash ^= (v >> (8 * byte)) & 0xff;
                hash *= 1099511628211ull;
            }
        };
        for (int b = 0; b < cfg_.batch_size; ++b) {
            const std::size_t pick = data_rng_.below(train_indices_.size());
            const auto& s = scenes_[static_cast<std::size_t>(train_indices_[pick])];
            auto patch = scene::extract_patch(s, ps, data_rng_);
            mix(pick);
            mix(static_cast<std::uint64_t>(patch.row0));
            mix(static_cast<std::uint64_t>(patch.col0));
            for (int c = 0; c < scene::kNumChannels; ++c) {
                T* dst = x.data() + (static_cast<std::size_t>(b) * scene::kNumChannels + c) * pp;
                const float* src = patch.channels.data() + static_cast<std::size_t>(c) * pp;
                for (std::size_t i = 0; i < pp; ++i) dst[i] = static_cast<T>(src[i]);
            }
            if (cfg_.mode == Mode::weak) {
                regionloss::RegionItem item;
                item.polygon_map = patch.polygon_map;
                item.land_mask = patch.land_mask;
                item.chart = patch.chart;
                items.push_back(std::move(item));
            } else {
                labels.push_back(
                    regionloss::derive_pixel_labels(*patch.chart, patch.polygon_map));
                masks.push_back(patch.land_mask);
            }
        }

        ad::Tape<T> tape;
        ad::Var probs = unet::forward(tape, net_, tape.leaf(std::move(x)));
        std::optional<ad::Var> loss;
        if (cfg_.mode == Mode::weak)
            loss = regionloss::batch_region_loss(tape, probs, std::move(items));
        else
            loss = regionloss::pixel_ce_masked(tape, probs, std::move(labels),
                                               std::move(masks));

        history_.iter_lr.push_back(lr);
        history_.iter_sample_hash.push_back(hash);
        if (!loss) {
            // No contributing pixel in the whole batch: skip the step.
            history_.iter_loss.push_back(0.0);
            history_.iter_stepped.push_back(0);
            return;
        }
        history_.iter_loss.push_back(static_cast<double>(tape.value(*loss)[0]));
        history_.iter_stepped.push_back(1);
        net_.zero_grad();
        tape.backward(*loss);
        sgdm_step(net_, opt_, lr, cfg_.momentum, cfg_.weight_decay);
    }

    TrainConfig cfg_;
    std::vector<scene::Scene> scenes_;  // normalized
    std::vector<int> train_indices_;
    std::vector<int> val_indices_;
    scene::ChannelStats stats_;
    unet::UNetParams<T> net_;
    OptimizerState<T> opt_;
    PortableRng data_rng_;
    History history_;
    int epochs_completed_ = 0;
};

/// Convenience wrapper matching the one-shot surface: train to completion.
template <class T>
std::pair<unet::UNetParams<T>, History> train(std::vector<scene::Scene> dataset,
                                              const TrainConfig& cfg) {
    Trainer<T> t(std::move(dataset), cfg);
    t.run();
    return {std::move(t.params()), t.history()};
}

/// Per-iteration history CSV (bitwise stable across reruns).
inline void write_history_csv(const History& h, int iterations_per_epoch,
                              const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    FLB_CHECK_DATA(os.good(), "cannot write ", path.string());
    os << "epoch,iter,lr,loss,sample_hash,stepped\n";
    char buf[128];
    for (std::size_t i = 0; i < h.iter_loss.size(); ++i) {
        const int epoch = static_cast<int>(i) / iterations_per_epoch;
        const int it = static_cast<int>(i) % iterations_per_epoch;
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%llu,%d\n", epoch, it,
                      h.iter_lr[i], h.iter_loss[i],
                      static_cast<unsigned long long>(h.iter_sample_hash[i]),
                      static_cast<int>(h.iter_stepped[i]));
        os << buf;
    }
}

inline void write_val_csv(const History& h, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    FLB_CHECK_DATA(os.good(), "cannot write ", path.string());
    os << "epoch,r2_water,r2_young_ice,r2_first_year_ice,r2_multiyear_ice,"
          "defined_water,defined_young_ice,defined_first_year_ice,defined_multiyear_ice,"
          "pixel_accuracy,n_poly\n";
    char buf[256];
    for (std::size_t e = 0; e < h.val.size(); ++e) {
        const auto& v = h.val[e];
        os << e;
        for (int c = 0; c < 4; ++c) {
            if (v.defined[static_cast<std::size_t>(c)]) {
                std::snprintf(buf, sizeof(buf), ",%.17g", v.r2[static_cast<std::size_t>(c)]);
                os << buf;
            } else {
                os << ",nan";
            }
        }
        for (int c = 0; c < 4; ++c) os << ',' << (v.defined[static_cast<std::size_t>(c)] ? 1 : 0);
        if (v.pixel_accuracy) {
            std::snprintf(buf, sizeof(buf), ",%.17g", *v.pixel_accuracy);
            os << buf;
        } else {
            os << ",nan";
        }
        os << ',' << v.n_poly << '\n';
    }
}

}  // namespace floeberg::trainer
