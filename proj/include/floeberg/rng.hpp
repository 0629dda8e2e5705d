// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "floeberg/check.hpp"

namespace floeberg {

// 64-bit finalizer used to derive independent child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Distinct deterministic stream per (master seed, tag).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(splitmix64(master ^ tag) + tag);
}

// Seed tags for the independent RNG streams of a run.
inline constexpr std::uint64_t kSeedSplit = 0x53504C4954ull;   // train/val split
inline constexpr std::uint64_t kSeedInit = 0x494E4954ull;      // parameter init
inline constexpr std::uint64_t kSeedData = 0x44415441ull;      // batch sampling
inline constexpr std::uint64_t kSeedScenes = 0x5343454E45ull;  // per-scene generation

/// Deterministic RNG whose derived draws are identical on every platform.
///
/// std::mt19937_64's raw output sequence is pinned by the standard, but the
/// distribution adaptors are not, so bounded integers, uniforms and normals
/// are derived here explicitly.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t u64() { return eng_(); }

    /// Unbiased draw in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) {
        FLB_REQUIRE(n > 0, "PortableRng::below: n must be positive");
        // Lemire's multiply-then-reject method.
        std::uint64_t x = u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = -n % n;
            while (lo < threshold) {
                x = u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = (static_cast<double>(u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Textual state capture (engine state is standardized, so this is portable).
    /// The cached spare is stored as its bit pattern for an exact round trip.
    std::string save_state() const {
        std::ostringstream os;
        os << eng_ << ' ' << (has_spare_ ? 1 : 0) << ' ' << std::bit_cast<std::uint64_t>(spare_);
        return os.str();
    }

    void restore_state(const std::string& s) {
        std::istringstream is(s);
        int flag = 0;
        std::uint64_t spare_bits = 0;
        is >> eng_ >> flag >> spare_bits;
        FLB_CHECK_DATA(!is.fail(), "PortableRng: malformed state string");
        has_spare_ = flag != 0;
        spare_ = std::bit_cast<double>(spare_bits);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace floeberg
