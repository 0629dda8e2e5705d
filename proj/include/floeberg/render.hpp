// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace floeberg::render {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};

// Class colors: dark blue water, light blue young ice, yellow first-year,
// red multiyear; land is masked white, unlabeled pixels are black.
inline constexpr std::array<Rgb, 4> kClassPalette = {
    Rgb{10, 30, 120}, Rgb{110, 190, 255}, Rgb{255, 215, 0}, Rgb{200, 20, 20}};
inline constexpr Rgb kLandColor{255, 255, 255};
inline constexpr Rgb kNoneColor{0, 0, 0};

/// Binary PPM (P6, maxval 255) of a class plane. land may be empty.
std::string render_ppm(std::span<const std::uint8_t> classes,
                       std::span<const std::uint8_t> land, int height, int width);

void write_ppm(const std::filesystem::path& path, const std::string& ppm);

}  // namespace floeberg::render
