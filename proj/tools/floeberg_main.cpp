// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
//
// floeberg: generate synthetic scenes, train the weakly supervised or
// baseline model, evaluate polygon R2, predict class maps, render them.
//
// Exit codes: 0 success, 1 usage error, 2 data/model error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floeberg/evalmetrics.hpp"
#include "floeberg/render.hpp"
#include "floeberg/scene.hpp"
#include "floeberg/synthgen.hpp"
#include "floeberg/trainer.hpp"

namespace fs = std::filesystem;
using namespace floeberg;

namespace {

struct GenArgs {
    std::string preset;
    int scenes = 0;
    std::string out;
    std::uint64_t seed = 0;
    int height = 0, width = 0, sites = 0, radius = -1, month = 0;
    double land_frac = -1.0;
};

struct TrainArgs {
    std::string data;
    std::string out;
    std::string mode = "weak";
    trainer::TrainConfig cfg;
};

struct EvalArgs {
    std::string data;
    std::string checkpoint;
    std::string out;
    std::string split = "all";
};

struct PredictArgs {
    std::string scene;
    std::string checkpoint;
    std::string out;
};

struct RenderArgs {
    std::string scene;
    std::string classes;
    std::string land;
    std::string out;
    int height = 0, width = 0;
};

std::vector<std::uint8_t> read_u8_plane(const fs::path& path, std::size_t expect) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    FLB_CHECK_DATA(is.good(), "cannot open ", path.string());
    const auto size = static_cast<std::size_t>(is.tellg());
    FLB_CHECK_DATA(size == expect, "class plane ", path.string(), " holds ", size,
                   " bytes, expected ", expect);
    is.seekg(0);
    std::vector<std::uint8_t> buf(size);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
    return buf;
}

int run_gen(const GenArgs& args) {
    synthgen::SynthConfig cfg = synthgen::preset(args.preset);
    if (args.height > 0) cfg.height = args.height;
    if (args.width > 0) cfg.width = args.width;
    if (args.sites > 0) cfg.n_polygon_sites = args.sites;
    if (args.radius >= 0) cfg.smoothing_radius = args.radius;
    if (args.land_frac >= 0.0) cfg.land_fraction = args.land_frac;
    if (args.month > 0) cfg.month = args.month;
    synthgen::gen_dataset(cfg, args.scenes, args.seed, args.out);
    std::printf("wrote %d %s scene(s) to %s\n", args.scenes, cfg.preset_name.c_str(),
                args.out.c_str());
    return 0;
}

int run_train(TrainArgs& args) {
    args.cfg.mode = trainer::mode_from_name(args.mode);
    auto dataset = scene::load_dataset(args.data);
    std::printf("loaded %zu scene(s) from %s\n", dataset.size(), args.data.c_str());
    trainer::Trainer<float> t(std::move(dataset), args.cfg);
    std::printf("training %s mode: %d epoch(s) x %d iteration(s), batch %d, patch %d\n",
                trainer::mode_name(args.cfg.mode), args.cfg.epochs,
                args.cfg.iterations_per_epoch, args.cfg.batch_size, args.cfg.patch_size);
    for (int e = 0; e < args.cfg.epochs; ++e) {
        t.run_epochs(1);
        const auto& h = t.history();
        double mean = 0.0;
        for (int i = 0; i < args.cfg.iterations_per_epoch; ++i)
            mean += h.iter_loss[static_cast<std::size_t>(e * args.cfg.iterations_per_epoch + i)];
        mean /= args.cfg.iterations_per_epoch;
        std::printf("epoch %3d/%d  lr %.6g  train loss %.6g", e + 1, args.cfg.epochs,
                    h.epoch_lr[static_cast<std::size_t>(e)], mean);
        if (!h.val.empty() && h.val.size() == static_cast<std::size_t>(e + 1)) {
            const auto& v = h.val.back();
            if (v.pixel_accuracy) std::printf("  val acc %.4f", *v.pixel_accuracy);
            std::printf("  val R2");
            for (int c = 0; c < 4; ++c) {
                if (v.defined[static_cast<std::size_t>(c)])
                    std::printf(" %.3f", v.r2[static_cast<std::size_t>(c)]);
                else
                    std::printf(" n/a");
            }
        }
        std::printf("\n");
        std::fflush(stdout);
    }
    fs::create_directories(args.out);
    t.save(fs::path(args.out) / "checkpoint.bin");
    trainer::write_history_csv(t.history(), args.cfg.iterations_per_epoch,
                               fs::path(args.out) / "history.csv");
    trainer::write_val_csv(t.history(), fs::path(args.out) / "val.csv");
    std::printf("wrote checkpoint.bin, history.csv, val.csv to %s\n", args.out.c_str());
    return 0;
}

int run_eval(const EvalArgs& args) {
    auto ck = trainer::load_checkpoint<float>(args.checkpoint);
    auto dataset = scene::load_dataset(args.data);
    FLB_CHECK_DATA(!dataset.empty(), "eval: empty dataset at ", args.data);

    std::vector<int> keep;
    if (args.split == "all") {
        for (std::size_t i = 0; i < dataset.size(); ++i) keep.push_back(static_cast<int>(i));
    } else {
        const auto split =
            trainer::split_dataset(dataset.size(), ck.cfg.seed, ck.cfg.val_scenes);
        keep = args.split == "val" ? split.val : split.train;
    }
    FLB_CHECK_DATA(!keep.empty(), "eval: split '", args.split, "' selects no scenes");

    std::vector<scene::Scene> scenes;
    for (int i : keep) {
        scene::Scene s = std::move(dataset[static_cast<std::size_t>(i)]);
        if (ck.cfg.downscale_ratio > 1) s = scene::downscale_scene(s, ck.cfg.downscale_ratio);
        scenes.push_back(scene::normalize(std::move(s), ck.stats));
    }
    const auto report = evalmetrics::evaluate(ck.params, std::span<const scene::Scene>(scenes),
                                              ck.cfg.patch_size);
    fs::create_directories(args.out);
    {
        std::ofstream os(fs::path(args.out) / "report.csv", std::ios::trunc);
        os << evalmetrics::report_csv(report);
    }
    const std::string summary = evalmetrics::summary_text(
        report, msg("evaluation of ", args.checkpoint, " on ", args.data, " [",
                    args.split, " split, ", scenes.size(), " scene(s)]"));
    {
        std::ofstream os(fs::path(args.out) / "summary.txt", std::ios::trunc);
        os << summary;
    }
    std::fputs(summary.c_str(), stdout);
    return 0;
}

int run_predict(const PredictArgs& args) {
    auto ck = trainer::load_checkpoint<float>(args.checkpoint);
    scene::Scene s = scene::load_scene(args.scene);
    if (ck.cfg.downscale_ratio > 1) s = scene::downscale_scene(s, ck.cfg.downscale_ratio);
    s = scene::normalize(std::move(s), ck.stats);
    const auto probs = evalmetrics::predict_scene_probs(ck.params, s, ck.cfg.patch_size);
    const auto classes = evalmetrics::argmax_classes(probs.data(), s.plane_size());
    std::ofstream os(args.out, std::ios::binary | std::ios::trunc);
    FLB_CHECK_DATA(os.good(), "cannot write ", args.out);
    os.write(reinterpret_cast<const char*>(classes.data()),
             static_cast<std::streamsize>(classes.size()));
    std::printf("wrote %dx%d class plane to %s\n", s.height, s.width, args.out.c_str());
    return 0;
}

int run_render(const RenderArgs& args) {
    std::vector<std::uint8_t> classes;
    std::vector<std::uint8_t> land;
    int height = 0, width = 0;
    if (!args.scene.empty()) {
        const scene::Scene s = scene::load_scene(args.scene);
        height = s.height;
        width = s.width;
        land = s.land_mask;
        if (!args.classes.empty()) {
            classes = read_u8_plane(args.classes, s.plane_size());
        } else {
            FLB_CHECK_DATA(s.truth.has_value(), "scene ", args.scene,
                           " has no truth plane; pass --classes");
            classes = *s.truth;
        }
    } else {
        FLB_CHECK_DATA(args.height > 0 && args.width > 0,
                       "render: --height/--width required without --scene");
        height = args.height;
        width = args.width;
        const std::size_t n = static_cast<std::size_t>(height) * width;
        classes = read_u8_plane(args.classes, n);
        if (!args.land.empty()) land = read_u8_plane(args.land, n);
    }
    render::write_ppm(args.out,
                      render::render_ppm(classes, land, height, width));
    std::printf("wrote %dx%d PPM to %s\n", width, height, args.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sea-ice type segmentation from region-level chart labels"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a synthetic scene dataset");
    gen->add_option("--preset", gen_args.preset, "separable-v1 | mixed-v1")->required();
    gen->add_option("--scenes", gen_args.scenes, "number of scenes")->required();
    gen->add_option("--out", gen_args.out, "output dataset directory")->required();
    gen->add_option("--seed", gen_args.seed, "master seed");
    gen->add_option("--height", gen_args.height, "scene height override");
    gen->add_option("--width", gen_args.width, "scene width override");
    gen->add_option("--sites", gen_args.sites, "polygon site count override");
    gen->add_option("--radius", gen_args.radius, "smoothing radius override");
    gen->add_option("--land-frac", gen_args.land_frac, "land fraction override");
    gen->add_option("--month", gen_args.month, "acquisition month override");

    TrainArgs train_args;
    train_args.cfg.downscale_ratio = 1;  // synthetic scenes ship at full size
    train_args.cfg.patch_size = 64;
    train_args.cfg.batch_size = 8;
    train_args.cfg.iterations_per_epoch = 100;
    train_args.cfg.epochs = 10;
    train_args.cfg.restart_t0_epochs = 10;
    auto* train = app.add_subcommand("train", "train the segmentation model");
    train->add_option("--data", train_args.data, "dataset directory")->required();
    train->add_option("--out", train_args.out, "output directory")->required();
    train->add_option("--mode", train_args.mode, "weak | baseline");
    train->add_option("--seed", train_args.cfg.seed, "run seed");
    train->add_option("--lr", train_args.cfg.lr_max, "peak learning rate");
    train->add_option("--momentum", train_args.cfg.momentum, "SGDM momentum");
    train->add_option("--weight-decay", train_args.cfg.weight_decay, "L2 coefficient");
    train->add_option("--batch", train_args.cfg.batch_size, "patches per iteration");
    train->add_option("--iters", train_args.cfg.iterations_per_epoch, "iterations per epoch");
    train->add_option("--epochs", train_args.cfg.epochs, "total epochs");
    train->add_option("--t0", train_args.cfg.restart_t0_epochs,
                      "cosine restart period in epochs");
    train->add_option("--eta-min", train_args.cfg.eta_min, "cosine floor");
    train->add_option("--patch", train_args.cfg.patch_size, "training patch size");
    train->add_option("--downscale", train_args.cfg.downscale_ratio, "downscale ratio");
    train->add_option("--val", train_args.cfg.val_scenes,
                      "validation scenes (-1 auto, 0 none)");
    train->add_flag("--deterministic", train_args.cfg.deterministic,
                    "pin the scalar kernel backend");

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
    eval->add_option("--data", eval_args.data, "dataset directory")->required();
    eval->add_option("--checkpoint", eval_args.checkpoint, "checkpoint file")->required();
    eval->add_option("--out", eval_args.out, "output directory")->required();
    eval->add_option("--split", eval_args.split, "all | train | val")
        ->check(CLI::IsMember({"all", "train", "val"}));

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "write a per-pixel class plane");
    predict->add_option("--scene", predict_args.scene, "scene directory")->required();
    predict->add_option("--checkpoint", predict_args.checkpoint, "checkpoint file")->required();
    predict->add_option("--out", predict_args.out, "output .u8 path")->required();

    RenderArgs render_args;
    auto* render_cmd = app.add_subcommand("render", "render a class plane as PPM");
    render_cmd->add_option("--scene", render_args.scene, "scene directory");
    render_cmd->add_option("--classes", render_args.classes, "raw class plane (.u8)");
    render_cmd->add_option("--land", render_args.land, "raw land plane (.u8)");
    render_cmd->add_option("--height", render_args.height, "rows (raw mode)");
    render_cmd->add_option("--width", render_args.width, "columns (raw mode)");
    render_cmd->add_option("--out", render_args.out, "output PPM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (train->parsed()) return run_train(train_args);
        if (eval->parsed()) return run_eval(eval_args);
        if (predict->parsed()) return run_predict(predict_args);
        if (render_cmd->parsed()) return run_render(render_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
