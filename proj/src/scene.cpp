// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#include "floeberg/scene.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "floeberg/check.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw plane files are little-endian; big-endian hosts are unsupported");

namespace floeberg::scene {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_bytes(const fs::path& path, const void* data, std::size_t bytes) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    FLB_CHECK_DATA(os.good(), "cannot open ", path.string(), " for writing");
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    FLB_CHECK_DATA(os.good(), "write failed: ", path.string());
}

std::vector<char> read_bytes(const fs::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    FLB_CHECK_DATA(is.good(), "missing file: ", path.string());
    const auto size = is.tellg();
    is.seekg(0);
    std::vector<char> buf(static_cast<std::size_t>(size));
    is.read(buf.data(), size);
    FLB_CHECK_DATA(is.good(), "read failed: ", path.string());
    return buf;
}

std::string read_text(const fs::path& path) {
    auto bytes = read_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

template <class T>
std::vector<T> read_plane(const fs::path& path, std::size_t expect, const char* name) {
    const auto buf = read_bytes(path);
    FLB_CHECK_DATA(buf.size() == expect * sizeof(T), "plane size mismatch: ", name,
                   " (", buf.size() / sizeof(T), " values, expected ", expect, ")");
    std::vector<T> out(expect);
    std::memcpy(out.data(), buf.data(), buf.size());
    return out;
}

}  // namespace

void Scene::validate() const {
    FLB_CHECK_DATA(height > 0 && width > 0, "scene ", meta.scene_id, ": empty dimensions");
    const std::size_t n = plane_size();
    FLB_CHECK_DATA(channels.size() == n * kNumChannels, "scene ", meta.scene_id,
                   ": channel block size mismatch");
    FLB_CHECK_DATA(polygon_map.size() == n, "scene ", meta.scene_id,
                   ": polygon map size mismatch");
    FLB_CHECK_DATA(land_mask.size() == n, "scene ", meta.scene_id,
                   ": land mask size mismatch");
    FLB_CHECK_DATA(meta.month >= 1 && meta.month <= 12, "scene ", meta.scene_id,
                   ": month ", meta.month, " outside [1,12]");
    for (std::size_t i = 0; i < n; ++i) {
        FLB_CHECK_DATA(land_mask[i] <= 1, "scene ", meta.scene_id,
                       ": land mask holds value ", int(land_mask[i]));
        FLB_CHECK_DATA(polygon_map[i] >= -1, "scene ", meta.scene_id,
                       ": polygon id ", polygon_map[i], " below -1");
    }
    std::set<int> ids(polygon_map.begin(), polygon_map.end());
    ids.erase(-1);
    for (int id : ids)
        FLB_CHECK_DATA(chart.contains(id), "scene ", meta.scene_id,
                       ": unreferenced polygon ", id);
    if (truth) {
        FLB_CHECK_DATA(truth->size() == n, "scene ", meta.scene_id,
                       ": truth plane size mismatch");
        for (std::uint8_t v : *truth)
            FLB_CHECK_DATA(v < icechart::kNumClasses || v == 255, "scene ",
                           meta.scene_id, ": truth holds value ", int(v));
    }
}

void save_scene(const Scene& s, const fs::path& dir) {
    s.validate();
    fs::create_directories(dir);

    json manifest;
    manifest["version"] = 1;
    manifest["height"] = s.height;
    manifest["width"] = s.width;
    manifest["channels"] = kChannelNames;
    manifest["month"] = s.meta.month;
    manifest["scene_id"] = s.meta.scene_id;
    manifest["center_lat"] = s.meta.center_lat;
    manifest["center_lon"] = s.meta.center_lon;
    std::ofstream mos(dir / "manifest.json", std::ios::trunc);
    FLB_CHECK_DATA(mos.good(), "cannot write manifest in ", dir.string());
    mos << manifest.dump(2) << '\n';
    mos.close();

    const std::size_t n = s.plane_size();
    for (int c = 0; c < kNumChannels; ++c)
        write_bytes(dir / (std::string(kChannelNames[static_cast<std::size_t>(c)]) + ".f32"),
                    s.channel(c), n * sizeof(float));
    write_bytes(dir / "polygons.i32", s.polygon_map.data(), n * sizeof(std::int32_t));
    write_bytes(dir / "land.u8", s.land_mask.data(), n);
    {
        std::ofstream cos(dir / "chart.csv", std::ios::trunc);
        FLB_CHECK_DATA(cos.good(), "cannot write chart in ", dir.string());
        cos << icechart::write_chart(s.chart);
    }
    if (s.truth) write_bytes(dir / "truth.u8", s.truth->data(), n);
}

Scene load_scene(const fs::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_text(dir / "manifest.json"));
    } catch (const json::exception& e) {
        fail_data(msg("bad manifest in ", dir.string(), ": ", e.what()));
    }
    FLB_CHECK_DATA(manifest.value("version", -1) == 1, "bad scene version in ",
                   dir.string());

    Scene s;
    try {
        s.height = manifest.at("height").get<int>();
        s.width = manifest.at("width").get<int>();
        s.meta.month = manifest.at("month").get<int>();
        s.meta.scene_id = manifest.at("scene_id").get<std::string>();
        s.meta.center_lat = manifest.at("center_lat").get<double>();
        s.meta.center_lon = manifest.at("center_lon").get<double>();
        const auto names = manifest.at("channels").get<std::vector<std::string>>();
        FLB_CHECK_DATA(names.size() == kNumChannels, "manifest channel list has ",
                       names.size(), " entries, expected ", kNumChannels);
        for (int c = 0; c < kNumChannels; ++c)
            FLB_CHECK_DATA(names[static_cast<std::size_t>(c)] == kChannelNames[static_cast<std::size_t>(c)],
                           "manifest channel ", c, " is '", names[static_cast<std::size_t>(c)],
                           "', expected '", kChannelNames[static_cast<std::size_t>(c)], "'");
    } catch (const json::exception& e) {
        fail_data(msg("bad manifest in ", dir.string(), ": ", e.what()));
    }
    FLB_CHECK_DATA(s.height > 0 && s.width > 0, "bad dimensions in ", dir.string());

    const std::size_t n = s.plane_size();
    s.channels.resize(n * kNumChannels);
    for (int c = 0; c < kNumChannels; ++c) {
        const auto plane = read_plane<float>(
            dir / (std::string(kChannelNames[static_cast<std::size_t>(c)]) + ".f32"), n,
            kChannelNames[static_cast<std::size_t>(c)]);
        std::memcpy(s.channel(c), plane.data(), n * sizeof(float));
    }
    s.polygon_map = read_plane<std::int32_t>(dir / "polygons.i32", n, "polygons");
    s.land_mask = read_plane<std::uint8_t>(dir / "land.u8", n, "land");
    s.chart = icechart::parse_chart(read_text(dir / "chart.csv"));
    if (fs::exists(dir / "truth.u8"))
        s.truth = read_plane<std::uint8_t>(dir / "truth.u8", n, "truth");
    s.validate();
    return s;
}

std::vector<Scene> load_dataset(const fs::path& dir) {
    const std::string index = read_text(dir / "index.txt");
    std::vector<Scene> scenes;
    std::size_t pos = 0;
    while (pos <= index.size()) {
        const std::size_t nl = index.find('\n', pos);
        std::string id = index.substr(pos, nl == std::string::npos ? index.size() - pos
                                                                   : nl - pos);
        pos = nl == std::string::npos ? index.size() + 1 : nl + 1;
        while (!id.empty() && (id.back() == '\r' || id.back() == ' ')) id.pop_back();
        if (id.empty()) continue;
        scenes.push_back(load_scene(dir / id));
    }
    return scenes;
}

Scene downscale_scene(const Scene& s, int ratio) {
    FLB_REQUIRE(ratio >= 1, "downscale_scene: ratio must be positive, got ", ratio);
    const int oh = s.height / ratio;
    const int ow = s.width / ratio;
    FLB_REQUIRE(oh >= 1 && ow >= 1, "downscale_scene: ratio ", ratio,
                " exceeds scene dimensions ", s.height, "x", s.width);

    Scene out;
    out.height = oh;
    out.width = ow;
    out.chart = s.chart;
    out.meta = s.meta;
    const std::size_t on = out.plane_size();
    out.channels.resize(on * kNumChannels);
    out.polygon_map.resize(on);
    out.land_mask.resize(on);
    if (s.truth) out.truth = std::vector<std::uint8_t>(on);

    const double inv = 1.0 / (static_cast<double>(ratio) * ratio);
    for (int c = 0; c < kNumChannels; ++c) {
        const float* src = s.channel(c);
        float* dst = out.channel(c);
        for (int r = 0; r < oh; ++r) {
            for (int q = 0; q < ow; ++q) {
                double acc = 0.0;
                for (int dr = 0; dr < ratio; ++dr) {
                    const float* row = src + (static_cast<std::size_t>(r) * ratio + dr) * s.width +
                                       static_cast<std::size_t>(q) * ratio;
                    for (int dq = 0; dq < ratio; ++dq) acc += row[dq];
                }
                dst[static_cast<std::size_t>(r) * ow + q] = static_cast<float>(acc * inv);
            }
        }
    }

    auto block_majority = [&](const auto& plane, int r, int q, auto none) ->
        typename std::decay_t<decltype(plane)>::value_type {
            std::map<typename std::decay_t<decltype(plane)>::value_type, int> counts;
            for (int dr = 0; dr < ratio; ++dr) {
                const auto* row = plane.data() +
                                  (static_cast<std::size_t>(r) * ratio + dr) * s.width +
                                  static_cast<std::size_t>(q) * ratio;
                for (int dq = 0; dq < ratio; ++dq) ++counts[row[dq]];
            }
            auto best = none;
            int best_count = -1;
            for (const auto& [value, count] : counts) {
                if (count > best_count) {  // map iterates ascending: ties keep smallest
                    best = value;
                    best_count = count;
                }
            }
            return best;
        };

    for (int r = 0; r < oh; ++r) {
        for (int q = 0; q < ow; ++q) {
            const std::size_t o = static_cast<std::size_t>(r) * ow + q;
            out.polygon_map[o] = block_majority(s.polygon_map, r, q, std::int32_t(-1));
            if (s.truth) (*out.truth)[o] = block_majority(*s.truth, r, q, std::uint8_t(255));
            std::uint8_t land = 0;
            for (int dr = 0; dr < ratio && !land; ++dr) {
                const std::uint8_t* row = s.land_mask.data() +
                                          (static_cast<std::size_t>(r) * ratio + dr) * s.width +
                                          static_cast<std::size_t>(q) * ratio;
                for (int dq = 0; dq < ratio; ++dq)
                    if (row[dq]) {
                        land = 1;
                        break;
                    }
            }
            out.land_mask[o] = land;
        }
    }
    return out;
}

ChannelStats compute_stats(std::span<const Scene> scenes) {
    FLB_REQUIRE(!scenes.empty(), "compute_stats: empty scene list");
    ChannelStats stats;
    for (int c = 0; c < kNumChannels; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (const Scene& s : scenes) {
            const float* plane = s.channel(c);
            const std::size_t n = s.plane_size();
            for (std::size_t i = 0; i < n; ++i) {
                if (s.land_mask[i]) continue;
                sum += plane[i];
                ++count;
            }
        }
        FLB_REQUIRE(count > 0, "compute_stats: no sea pixels in input");
        const double mean = sum / static_cast<double>(count);
        double m2 = 0.0;
        for (const Scene& s : scenes) {
            const float* plane = s.channel(c);
            const std::size_t n = s.plane_size();
            for (std::size_t i = 0; i < n; ++i) {
                if (s.land_mask[i]) continue;
                const double d = plane[i] - mean;
                m2 += d * d;
            }
        }
        stats.mean[static_cast<std::size_t>(c)] = mean;
        stats.stddev[static_cast<std::size_t>(c)] = std::sqrt(m2 / static_cast<double>(count));
    }
    return stats;
}

Scene normalize(Scene s, const ChannelStats& stats) {
    const std::size_t n = s.plane_size();
    for (int c = 0; c < kNumChannels; ++c) {
        float* plane = s.channel(c);
        const double sd = stats.stddev[static_cast<std::size_t>(c)];
        if (sd < 1e-12) {
            std::fill(plane, plane + n, 0.0f);
            continue;
        }
        const double mean = stats.mean[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < n; ++i)
            plane[i] = static_cast<float>((plane[i] - mean) / sd);
    }
    return s;
}

Patch extract_patch(const Scene& s, int size, PortableRng& rng) {
    FLB_REQUIRE(size >= 1 && size <= s.height && size <= s.width,
                "extract_patch: patch size ", size, " exceeds scene ", s.height, "x",
                s.width);
    std::unordered_map<int, bool> usable;
    for (const auto& [id, entry] : s.chart.entries) usable[id] = entry.has_value();

    const auto rows = static_cast<std::uint64_t>(s.height - size + 1);
    const auto cols = static_cast<std::uint64_t>(s.width - size + 1);
    int r0 = 0, c0 = 0;
    for (int attempt = 0; attempt < 10; ++attempt) {
        r0 = static_cast<int>(rng.below(rows));
        c0 = static_cast<int>(rng.below(cols));
        bool found = false;
        for (int r = 0; r < size && !found; ++r) {
            const std::int32_t* row =
                s.polygon_map.data() + (static_cast<std::size_t>(r0) + r) * s.width + c0;
            for (int q = 0; q < size; ++q) {
                const std::int32_t id = row[q];
                if (id >= 0 && usable.at(id)) {
                    found = true;
                    break;
                }
            }
        }
        if (found) break;
    }

    Patch p;
    p.size = size;
    p.row0 = r0;
    p.col0 = c0;
    p.chart = &s.chart;
    const std::size_t pp = static_cast<std::size_t>(size) * size;
    p.channels.resize(pp * kNumChannels);
    p.polygon_map.resize(pp);
    p.land_mask.resize(pp);
    for (int c = 0; c < kNumChannels; ++c) {
        const float* src = s.channel(c);
        float* dst = p.channels.data() + static_cast<std::size_t>(c) * pp;
        for (int r = 0; r < size; ++r)
            std::memcpy(dst + static_cast<std::size_t>(r) * size,
                        src + (static_cast<std::size_t>(r0) + r) * s.width + c0,
                        sizeof(float) * static_cast<std::size_t>(size));
    }
    for (int r = 0; r < size; ++r) {
        std::memcpy(p.polygon_map.data() + static_cast<std::size_t>(r) * size,
                    s.polygon_map.data() + (static_cast<std::size_t>(r0) + r) * s.width + c0,
                    sizeof(std::int32_t) * static_cast<std::size_t>(size));
        std::memcpy(p.land_mask.data() + static_cast<std::size_t>(r) * size,
                    s.land_mask.data() + (static_cast<std::size_t>(r0) + r) * s.width + c0,
                    static_cast<std::size_t>(size));
    }
    return p;
}

std::vector<Patch> extract_patches(const Scene& s, int size, std::uint64_t seed,
                                   int count) {
    FLB_REQUIRE(count >= 0, "extract_patches: negative count");
    PortableRng rng(seed);
    std::vector<Patch> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(extract_patch(s, size, rng));
    return out;
}

}  // namespace floeberg::scene
