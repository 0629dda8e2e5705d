// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "floeberg/check.hpp"
#include "floeberg/kernels.hpp"

namespace floeberg::kern {

namespace detail {
const Ops<float>& scalar_f32();
const Ops<double>& scalar_f64();
#ifdef FLOEBERG_WITH_AVX2
const Ops<float>& avx2_f32();
const Ops<double>& avx2_f64();
#endif
}  // namespace detail

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
    }
    return "?";
}

bool cpu_has_avx2() {
#ifdef FLOEBERG_WITH_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Isa detect_isa() {
    if (const char* env = std::getenv("FLOEBERG_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::avx2;
        // Unknown or unsupported request falls through to autodetection.
    }
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& active_slot() {
    static std::atomic<Isa> slot{detect_isa()};
    return slot;
}

}  // namespace

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    FLB_REQUIRE(isa == Isa::scalar || cpu_has_avx2(),
                "kernel backend '", isa_name(isa), "' is not supported on this CPU");
    active_slot().store(isa, std::memory_order_relaxed);
}

template <>
const Ops<float>& ops<float>(Isa isa) {
#ifdef FLOEBERG_WITH_AVX2
    if (isa == Isa::avx2) return detail::avx2_f32();
#endif
    FLB_REQUIRE(isa == Isa::scalar, "kernel backend '", isa_name(isa),
                "' is not available in this build");
    return detail::scalar_f32();
}

template <>
const Ops<double>& ops<double>(Isa isa) {
#ifdef FLOEBERG_WITH_AVX2
    if (isa == Isa::avx2) return detail::avx2_f64();
#endif
    FLB_REQUIRE(isa == Isa::scalar, "kernel backend '", isa_name(isa),
                "' is not available in this build");
    return detail::scalar_f64();
}

}  // namespace floeberg::kern
