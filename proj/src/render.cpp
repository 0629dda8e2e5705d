// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#include "floeberg/render.hpp"

#include <fstream>

#include "floeberg/check.hpp"

namespace floeberg::render {

std::string render_ppm(std::span<const std::uint8_t> classes,
                       std::span<const std::uint8_t> land, int height, int width) {
    const std::size_t n = static_cast<std::size_t>(height) * width;
    FLB_REQUIRE(height > 0 && width > 0, "render_ppm: empty image");
    FLB_REQUIRE(classes.size() == n, "render_ppm: class plane has ", classes.size(),
                " pixels, expected ", n);
    FLB_REQUIRE(land.empty() || land.size() == n, "render_ppm: land plane size mismatch");

    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) +
                      "\n255\n";
    out.reserve(out.size() + n * 3);
    for (std::size_t i = 0; i < n; ++i) {
        Rgb color;
        if (!land.empty() && land[i]) {
            color = kLandColor;
        } else if (classes[i] < kClassPalette.size()) {
            color = kClassPalette[classes[i]];
        } else {
            FLB_REQUIRE(classes[i] == 255, "render_ppm: class value ", int(classes[i]));
            color = kNoneColor;
        }
        out.push_back(static_cast<char>(color.r));
        out.push_back(static_cast<char>(color.g));
        out.push_back(static_cast<char>(color.b));
    }
    return out;
}

void write_ppm(const std::filesystem::path& path, const std::string& ppm) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    FLB_CHECK_DATA(os.good(), "cannot write ", path.string());
    os.write(ppm.data(), static_cast<std::streamsize>(ppm.size()));
    FLB_CHECK_DATA(os.good(), "write failed: ", path.string());
}

}  // namespace floeberg::render
