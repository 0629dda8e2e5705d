// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
//
// Rough single-thread GEMM throughput per backend; used to size training
// budgets, not part of the test suite.

#include <chrono>
#include <cstdio>
#include <vector>

#include "floeberg/kernels.hpp"
#include "floeberg/rng.hpp"

using namespace floeberg;

namespace {

template <class T>
double bench_gemm(kern::Isa isa, int m, int n, int k, int reps) {
    const auto& K = kern::ops<T>(isa);
    PortableRng rng(1);
    std::vector<T> a(static_cast<std::size_t>(m) * k), b(static_cast<std::size_t>(k) * n),
        c(static_cast<std::size_t>(m) * n);
    for (auto& v : a) v = static_cast<T>(rng.uniform01() - 0.5);
    for (auto& v : b) v = static_cast<T>(rng.uniform01() - 0.5);
    K.gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r)
        K.gemm_nn(m, n, k, a.data(), k, b.data(), n, c.data(), n, false);
    const auto t1 = std::chrono::steady_clock::now();
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    const double flops = 2.0 * m * n * k * reps;
    return flops / secs / 1e9;
}

}  // namespace

int main() {
    std::printf("cpu avx2: %s, active: %s\n", kern::cpu_has_avx2() ? "yes" : "no",
                kern::isa_name(kern::active_isa()));
    struct Case {
        int m, n, k, reps;
    } cases[] = {
        {16, 4096, 63, 200},   // first encoder conv, 64x64 patch
        {64, 1024, 288, 200},  // mid encoder
        {64, 256, 1152, 200},  // concat decoder conv, 16x16
        {128, 512, 512, 100},  // square-ish reference
    };
    for (const auto& cs : cases) {
        const double s32 = bench_gemm<float>(kern::Isa::scalar, cs.m, cs.n, cs.k, cs.reps);
        double v32 = 0.0;
        if (kern::cpu_has_avx2())
            v32 = bench_gemm<float>(kern::Isa::avx2, cs.m, cs.n, cs.k, cs.reps);
        std::printf("gemm_nn f32 %4dx%5dx%5d scalar %7.2f GF/s  avx2 %7.2f GF/s\n",
                    cs.m, cs.n, cs.k, s32, v32);
    }
    const double s64 = bench_gemm<double>(kern::Isa::scalar, 64, 1024, 288, 100);
    const double v64 = kern::cpu_has_avx2()
                           ? bench_gemm<double>(kern::Isa::avx2, 64, 1024, 288, 100)
                           : 0.0;
    std::printf("gemm_nn f64   64x 1024x  288 scalar %7.2f GF/s  avx2 %7.2f GF/s\n", s64,
                v64);
    return 0;
}
