// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
//
// Drives the installed binary end to end. FLOEBERG_BIN and FLOEBERG_TEST_DATA
// come from the test environment.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "floeberg/render.hpp"
#include "floeberg/rng.hpp"

using namespace floeberg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("floeberg_cli_" + std::to_string(PortableRng(std::random_device{}()).u64()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

std::string binary() {
    const char* bin = std::getenv("FLOEBERG_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

fs::path test_data() {
    const char* dir = std::getenv("FLOEBERG_TEST_DATA");
    REQUIRE(dir != nullptr);
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary | std::ios::ate);
    REQUIRE(is.good());
    std::vector<char> buf(static_cast<std::size_t>(is.tellg()));
    is.seekg(0);
    is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    return buf;
}

bool trees_identical(const fs::path& a, const fs::path& b) {
    std::set<fs::path> rel_a, rel_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) rel_a.insert(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) rel_b.insert(fs::relative(e.path(), b));
    if (rel_a != rel_b) return false;
    for (const auto& rel : rel_a)
        if (slurp(a / rel) != slurp(b / rel)) return false;
    return true;
}

std::string csv_column(const fs::path& file, const std::string& name) {
    std::ifstream is(file);
    REQUIRE(is.good());
    std::string header;
    std::getline(is, header);
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= header.size(); ++i)
        if (i == header.size() || header[i] == ',') {
            cols.push_back(header.substr(start, i - start));
            start = i + 1;
        }
    std::size_t idx = cols.size();
    for (std::size_t i = 0; i < cols.size(); ++i)
        if (cols[i] == name) idx = i;
    REQUIRE(idx < cols.size());
    std::string out, line;
    while (std::getline(is, line)) {
        std::size_t col = 0, s = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                if (col == idx) out += line.substr(s, i - s) + "\n";
                ++col;
                s = i + 1;
            }
    }
    return out;
}

}  // namespace

TEST_CASE("exit codes: usage vs data errors") {
    TempDir tmp;
    CHECK(run("definitely-not-a-subcommand") == 1);
    CHECK(run("gen --preset separable-v1 --scenes 1") == 1);  // missing --out
    CHECK(run("--help") == 0);
    // Well-formed invocation against missing data: data error.
    CHECK(run("train --data " + (tmp.path / "nope").string() + " --out " +
              (tmp.path / "o").string()) == 2);
    CHECK(run("gen --preset bogus --scenes 1 --out " + (tmp.path / "g").string() +
              " --seed 1") == 2);
}

TEST_CASE("gen is byte-deterministic") {
    TempDir tmp;
    const std::string common = "gen --preset separable-v1 --scenes 2 --height 64 "
                               "--width 64 --seed 7 --out ";
    CHECK(run(common + (tmp.path / "a").string()) == 0);
    CHECK(run(common + (tmp.path / "b").string()) == 0);
    CHECK(trees_identical(tmp.path / "a", tmp.path / "b"));
}

TEST_CASE("render matches the committed golden PPM") {
    TempDir tmp;
    const auto classes = test_data() / "render_classes.u8";
    const auto land = test_data() / "render_land.u8";
    const auto golden = test_data() / "render_golden.ppm";
    const auto out = tmp.path / "out.ppm";
    CHECK(run("render --classes " + classes.string() + " --land " + land.string() +
              " --height 4 --width 5 --out " + out.string()) == 0);
    CHECK(slurp(out) == slurp(golden));

    // The library agrees with the committed bytes as well (the golden file was
    // built once from the documented palette by hand).
    const auto cls_bytes = slurp(classes);
    const auto land_bytes = slurp(land);
    const auto ppm = render::render_ppm(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(cls_bytes.data()),
                                      cls_bytes.size()),
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(land_bytes.data()),
                                      land_bytes.size()),
        4, 5);
    const auto want = slurp(golden);
    CHECK(std::string(want.begin(), want.end()) == ppm);
}

TEST_CASE("train/eval/predict/render pipeline with deterministic reruns") {
    TempDir tmp;
    const std::string data = (tmp.path / "data").string();
    CHECK(run("gen --preset separable-v1 --scenes 4 --height 64 --width 64 --seed 11 "
              "--out " + data) == 0);

    const std::string train_flags =
        " --mode weak --seed 3 --epochs 1 --iters 8 --batch 2 --patch 32 --val 1 "
        "--deterministic --data " + data + " --out ";
    CHECK(run("train" + train_flags + (tmp.path / "r1").string()) == 0);
    CHECK(run("train" + train_flags + (tmp.path / "r2").string()) == 0);
    CHECK(slurp(tmp.path / "r1" / "history.csv") == slurp(tmp.path / "r2" / "history.csv"));
    CHECK(slurp(tmp.path / "r1" / "checkpoint.bin") == slurp(tmp.path / "r2" / "checkpoint.bin"));

    // Baseline mode on the same seed draws identical samples, different losses.
    const std::string base_flags =
        " --mode baseline --seed 3 --epochs 1 --iters 8 --batch 2 --patch 32 --val 1 "
        "--deterministic --data " + data + " --out " + (tmp.path / "rb").string();
    CHECK(run("train" + base_flags) == 0);
    CHECK(csv_column(tmp.path / "r1" / "history.csv", "sample_hash") ==
          csv_column(tmp.path / "rb" / "history.csv", "sample_hash"));
    CHECK(csv_column(tmp.path / "r1" / "history.csv", "loss") !=
          csv_column(tmp.path / "rb" / "history.csv", "loss"));

    const std::string ckpt = (tmp.path / "r1" / "checkpoint.bin").string();
    CHECK(run("eval --data " + data + " --checkpoint " + ckpt + " --out " +
              (tmp.path / "ev").string() + " --split val") == 0);
    CHECK(fs::exists(tmp.path / "ev" / "report.csv"));
    CHECK(fs::exists(tmp.path / "ev" / "summary.txt"));
    {
        std::ifstream is(tmp.path / "ev" / "report.csv");
        std::string header;
        std::getline(is, header);
        CHECK(header == "class,r2,defined");
    }

    CHECK(run("predict --scene " + data + "/scene_0000 --checkpoint " + ckpt +
              " --out " + (tmp.path / "pred.u8").string()) == 0);
    CHECK(fs::file_size(tmp.path / "pred.u8") == 64 * 64);

    // Rendering the prediction and truth both succeed; prediction pixels are
    // palette colors only.
    CHECK(run("render --scene " + data + "/scene_0000 --classes " +
              (tmp.path / "pred.u8").string() + " --out " +
              (tmp.path / "pred.ppm").string()) == 0);
    CHECK(run("render --scene " + data + "/scene_0000 --out " +
              (tmp.path / "truth.ppm").string()) == 0);
    const auto ppm = slurp(tmp.path / "pred.ppm");
    CHECK(ppm.size() == 13 + 64 * 64 * 3);  // "P6\n64 64\n255\n" + pixels
}
