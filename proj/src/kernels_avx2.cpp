// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
//
// AVX2+FMA kernels. Compiled with -mavx2 -mfma and reached only through the
// dispatch table after a CPUID check. Results may differ from the scalar
// reference by floating-point rounding (FMA, vector reassociation) but are
// deterministic for fixed input.

#include <immintrin.h>

#include <cstddef>

#include "floeberg/kernels.hpp"

namespace floeberg::kern::detail {

namespace {

inline float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 shuf = _mm_movehdup_ps(lo);
    __m128 sums = _mm_add_ps(lo, shuf);
    shuf = _mm_movehl_ps(shuf, sums);
    sums = _mm_add_ss(sums, shuf);
    return _mm_cvtss_f32(sums);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d hi64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, hi64));
}

// Shared core for gemm_nn / gemm_tn: element A(r, p) = a[r*arow + p*acol].
// 4 C-rows x 16 columns of f32 (or 4 x 8 of f64) per microkernel step.

void gemm_core_f32(int m, int n, int k, const float* a, std::size_t arow,
                   std::size_t acol, const float* b, int ldb, float* c, int ldc,
                   bool acc) {
    const auto bstride = static_cast<std::size_t>(ldb);
    int i = 0;
    for (; i + 4 <= m; i += 4) {
        const float* a0 = a + (i + 0) * arow;
        const float* a1 = a + (i + 1) * arow;
        const float* a2 = a + (i + 2) * arow;
        const float* a3 = a + (i + 3) * arow;
        float* c0 = c + static_cast<std::size_t>(i + 0) * ldc;
        float* c1 = c + static_cast<std::size_t>(i + 1) * ldc;
        float* c2 = c + static_cast<std::size_t>(i + 2) * ldc;
        float* c3 = c + static_cast<std::size_t>(i + 3) * ldc;
        int j = 0;
        for (; j + 16 <= n; j += 16) {
            __m256 s00, s01, s10, s11, s20, s21, s30, s31;
            if (acc) {
                s00 = _mm256_loadu_ps(c0 + j);
                s01 = _mm256_loadu_ps(c0 + j + 8);
                s10 = _mm256_loadu_ps(c1 + j);
                s11 = _mm256_loadu_ps(c1 + j + 8);
                s20 = _mm256_loadu_ps(c2 + j);
                s21 = _mm256_loadu_ps(c2 + j + 8);
                s30 = _mm256_loadu_ps(c3 + j);
                s31 = _mm256_loadu_ps(c3 + j + 8);
            } else {
                s00 = s01 = s10 = s11 = s20 = s21 = s30 = s31 = _mm256_setzero_ps();
            }
            const float* brow = b + j;
            for (int p = 0; p < k; ++p, brow += bstride) {
                const __m256 b0 = _mm256_loadu_ps(brow);
                const __m256 b1 = _mm256_loadu_ps(brow + 8);
                const std::size_t po = p * acol;
                __m256 av = _mm256_broadcast_ss(a0 + po);
                s00 = _mm256_fmadd_ps(av, b0, s00);
                s01 = _mm256_fmadd_ps(av, b1, s01);
                av = _mm256_broadcast_ss(a1 + po);
                s10 = _mm256_fmadd_ps(av, b0, s10);
                s11 = _mm256_fmadd_ps(av, b1, s11);
                av = _mm256_broadcast_ss(a2 + po);
                s20 = _mm256_fmadd_ps(av, b0, s20);
                s21 = _mm256_fmadd_ps(av, b1, s21);
                av = _mm256_broadcast_ss(a3 + po);
                s30 = _mm256_fmadd_ps(av, b0, s30);
                s31 = _mm256_fmadd_ps(av, b1, s31);
            }
            _mm256_storeu_ps(c0 + j, s00);
            _mm256_storeu_ps(c0 + j + 8, s01);
            _mm256_storeu_ps(c1 + j, s10);
            _mm256_storeu_ps(c1 + j + 8, s11);
            _mm256_storeu_ps(c2 + j, s20);
            _mm256_storeu_ps(c2 + j + 8, s21);
            _mm256_storeu_ps(c3 + j, s30);
            _mm256_storeu_ps(c3 + j + 8, s31);
        }
        for (; j < n; ++j) {
            float r0 = acc ? c0[j] : 0.f;
            float r1 = acc ? c1[j] : 0.f;
            float r2 = acc ? c2[j] : 0.f;
            float r3 = acc ? c3[j] : 0.f;
            const float* bp = b + j;
            for (int p = 0; p < k; ++p, bp += bstride) {
                const std::size_t po = p * acol;
                r0 += a0[po] * *bp;
                r1 += a1[po] * *bp;
                r2 += a2[po] * *bp;
                r3 += a3[po] * *bp;
            }
            c0[j] = r0;
            c1[j] = r1;
            c2[j] = r2;
            c3[j] = r3;
        }
    }
    for (; i < m; ++i) {
        const float* ar = a + i * arow;
        float* cr = c + static_cast<std::size_t>(i) * ldc;
        int j = 0;
        for (; j + 8 <= n; j += 8) {
            __m256 s = acc ? _mm256_loadu_ps(cr + j) : _mm256_setzero_ps();
            const float* brow = b + j;
            for (int p = 0; p < k; ++p, brow += bstride)
                s = _mm256_fmadd_ps(_mm256_broadcast_ss(ar + p * acol),
                                    _mm256_loadu_ps(brow), s);
            _mm256_storeu_ps(cr + j, s);
        }
        for (; j < n; ++j) {
            float r = acc ? cr[j] : 0.f;
            const float* bp = b + j;
            for (int p = 0; p < k; ++p, bp += bstride) r += ar[p * acol] * *bp;
            cr[j] = r;
        }
    }
}

void gemm_core_f64(int m, int n, int k, const double* a, std::size_t arow,
                   std::size_t acol, const double* b, int ldb, double* c, int ldc,
                   bool acc) {
    const auto bstride = static_cast<std::size_t>(ldb);
    int i = 0;
    for (; i + 4 <= m; i += 4) {
        const double* a0 = a + (i + 0) * arow;
        const double* a1 = a + (i + 1) * arow;
        const double* a2 = a + (i + 2) * arow;
        const double* a3 = a + (i + 3) * arow;
        double* c0 = c + static_cast<std::size_t>(i + 0) * ldc;
        double* c1 = c + static_cast<std::size_t>(i + 1) * ldc;
        double* c2 = c + static_cast<std::size_t>(i + 2) * ldc;
        double* c3 = c + static_cast<std::size_t>(i + 3) * ldc;
        int j = 0;
        for (; j + 8 <= n; j += 8) {
            __m256d s00, s01, s10, s11, s20, s21, s30, s31;
            if (acc) {
                s00 = _mm256_loadu_pd(c0 + j);
                s01 = _mm256_loadu_pd(c0 + j + 4);
                s10 = _mm256_loadu_pd(c1 + j);
                s11 = _mm256_loadu_pd(c1 + j + 4);
                s20 = _mm256_loadu_pd(c2 + j);
                s21 = _mm256_loadu_pd(c2 + j + 4);
                s30 = _mm256_loadu_pd(c3 + j);
                s31 = _mm256_loadu_pd(c3 + j + 4);
            } else {
                s00 = s01 = s10 = s11 = s20 = s21 = s30 = s31 = _mm256_setzero_pd();
            }
            const double* brow = b + j;
            for (int p = 0; p < k; ++p, brow += bstride) {
                const __m256d b0 = _mm256_loadu_pd(brow);
                const __m256d b1 = _mm256_loadu_pd(brow + 4);
                const std::size_t po = p * acol;
                __m256d av = _mm256_broadcast_sd(a0 + po);
                s00 = _mm256_fmadd_pd(av, b0, s00);
                s01 = _mm256_fmadd_pd(av, b1, s01);
                av = _mm256_broadcast_sd(a1 + po);
                s10 = _mm256_fmadd_pd(av, b0, s10);
                s11 = _mm256_fmadd_pd(av, b1, s11);
                av = _mm256_broadcast_sd(a2 + po);
                s20 = _mm256_fmadd_pd(av, b0, s20);
                s21 = _mm256_fmadd_pd(av, b1, s21);
                av = _mm256_broadcast_sd(a3 + po);
                s30 = _mm256_fmadd_pd(av, b0, s30);
                s31 = _mm256_fmadd_pd(av, b1, s31);
            }
            _mm256_storeu_pd(c0 + j, s00);
            _mm256_storeu_pd(c0 + j + 4, s01);
            _mm256_storeu_pd(c1 + j, s10);
            _mm256_storeu_pd(c1 + j + 4, s11);
            _mm256_storeu_pd(c2 + j, s20);
            _mm256_storeu_pd(c2 + j + 4, s21);
            _mm256_storeu_pd(c3 + j, s30);
            _mm256_storeu_pd(c3 + j + 4, s31);
        }
        for (; j < n; ++j) {
            double r0 = acc ? c0[j] : 0.0;
            double r1 = acc ? c1[j] : 0.0;
            double r2 = acc ? c2[j] : 0.0;
            double r3 = acc ? c3[j] : 0.0;
            const double* bp = b + j;
            for (int p = 0; p < k; ++p, bp += bstride) {
                const std::size_t po = p * acol;
                r0 += a0[po] * *bp;
                r1 += a1[po] * *bp;
                r2 += a2[po] * *bp;
                r3 += a3[po] * *bp;
            }
            c0[j] = r0;
            c1[j] = r1;
            c2[j] = r2;
            c3[j] = r3;
        }
    }
    for (; i < m; ++i) {
        const double* ar = a + i * arow;
        double* cr = c + static_cast<std::size_t>(i) * ldc;
        int j = 0;
        for (; j + 4 <= n; j += 4) {
            __m256d s = acc ? _mm256_loadu_pd(cr + j) : _mm256_setzero_pd();
            const double* brow = b + j;
            for (int p = 0; p < k; ++p, brow += bstride)
                s = _mm256_fmadd_pd(_mm256_broadcast_sd(ar + p * acol),
                                    _mm256_loadu_pd(brow), s);
            _mm256_storeu_pd(cr + j, s);
        }
        for (; j < n; ++j) {
            double r = acc ? cr[j] : 0.0;
            const double* bp = b + j;
            for (int p = 0; p < k; ++p, bp += bstride) r += ar[p * acol] * *bp;
            cr[j] = r;
        }
    }
}

void gemm_nn_f32(int m, int n, int k, const float* a, int lda, const float* b,
                 int ldb, float* c, int ldc, bool acc) {
    gemm_core_f32(m, n, k, a, static_cast<std::size_t>(lda), 1, b, ldb, c, ldc, acc);
}
void gemm_tn_f32(int m, int n, int k, const float* a, int lda, const float* b,
                 int ldb, float* c, int ldc, bool acc) {
    gemm_core_f32(m, n, k, a, 1, static_cast<std::size_t>(lda), b, ldb, c, ldc, acc);
}
void gemm_nn_f64(int m, int n, int k, const double* a, int lda, const double* b,
                 int ldb, double* c, int ldc, bool acc) {
    gemm_core_f64(m, n, k, a, static_cast<std::size_t>(lda), 1, b, ldb, c, ldc, acc);
}
void gemm_tn_f64(int m, int n, int k, const double* a, int lda, const double* b,
                 int ldb, double* c, int ldc, bool acc) {
    gemm_core_f64(m, n, k, a, 1, static_cast<std::size_t>(lda), b, ldb, c, ldc, acc);
}

// C[i][j] = dot(A row i, B row j): vectorized along the shared k axis.
void gemm_nt_f32(int m, int n, int k, const float* a, int lda, const float* b,
                 int ldb, float* c, int ldc, bool acc) {
    for (int i = 0; i < m; ++i) {
        const float* arow = a + static_cast<std::size_t>(i) * lda;
        float* crow = c + static_cast<std::size_t>(i) * ldc;
        int j = 0;
        for (; j + 4 <= n; j += 4) {
            const float* b0 = b + static_cast<std::size_t>(j + 0) * ldb;
            const float* b1 = b + static_cast<std::size_t>(j + 1) * ldb;
            const float* b2 = b + static_cast<std::size_t>(j + 2) * ldb;
            const float* b3 = b + static_cast<std::size_t>(j + 3) * ldb;
            __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
            __m256 s2 = _mm256_setzero_ps(), s3 = _mm256_setzero_ps();
            int p = 0;
            for (; p + 8 <= k; p += 8) {
                const __m256 av = _mm256_loadu_ps(arow + p);
                s0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b0 + p), s0);
                s1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b1 + p), s1);
                s2 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b2 + p), s2);
                s3 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b3 + p), s3);
            }
            float r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
            for (; p < k; ++p) {
                const float av = arow[p];
                r0 += av * b0[p];
                r1 += av * b1[p];
                r2 += av * b2[p];
                r3 += av * b3[p];
            }
            if (acc) {
                crow[j] += r0;
                crow[j + 1] += r1;
                crow[j + 2] += r2;
                crow[j + 3] += r3;
            } else {
                crow[j] = r0;
                crow[j + 1] = r1;
                crow[j + 2] = r2;
                crow[j + 3] = r3;
            }
        }
        for (; j < n; ++j) {
            const float* brow = b + static_cast<std::size_t>(j) * ldb;
            __m256 s = _mm256_setzero_ps();
            int p = 0;
            for (; p + 8 <= k; p += 8)
                s = _mm256_fmadd_ps(_mm256_loadu_ps(arow + p), _mm256_loadu_ps(brow + p), s);
            float r = hsum(s);
            for (; p < k; ++p) r += arow[p] * brow[p];
            if (acc)
                crow[j] += r;
            else
                crow[j] = r;
        }
    }
}

void gemm_nt_f64(int m, int n, int k, const double* a, int lda, const double* b,
                 int ldb, double* c, int ldc, bool acc) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<std::size_t>(i) * lda;
        double* crow = c + static_cast<std::size_t>(i) * ldc;
        int j = 0;
        for (; j + 4 <= n; j += 4) {
            const double* b0 = b + static_cast<std::size_t>(j + 0) * ldb;
            const double* b1 = b + static_cast<std::size_t>(j + 1) * ldb;
            const double* b2 = b + static_cast<std::size_t>(j + 2) * ldb;
            const double* b3 = b + static_cast<std::size_t>(j + 3) * ldb;
            __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
            __m256d s2 = _mm256_setzero_pd(), s3 = _mm256_setzero_pd();
            int p = 0;
            for (; p + 4 <= k; p += 4) {
                const __m256d av = _mm256_loadu_pd(arow + p);
                s0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b0 + p), s0);
                s1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b1 + p), s1);
                s2 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b2 + p), s2);
                s3 = _mm256_fmadd_pd(av, _mm256_loadu_pd(b3 + p), s3);
            }
            double r0 = hsum(s0), r1 = hsum(s1), r2 = hsum(s2), r3 = hsum(s3);
            for (; p < k; ++p) {
                const double av = arow[p];
                r0 += av * b0[p];
                r1 += av * b1[p];
                r2 += av * b2[p];
                r3 += av * b3[p];
            }
            if (acc) {
                crow[j] += r0;
                crow[j + 1] += r1;
                crow[j + 2] += r2;
                crow[j + 3] += r3;
            } else {
                crow[j] = r0;
                crow[j + 1] = r1;
                crow[j + 2] = r2;
                crow[j + 3] = r3;
            }
        }
        for (; j < n; ++j) {
            const double* brow = b + static_cast<std::size_t>(j) * ldb;
            __m256d s = _mm256_setzero_pd();
            int p = 0;
            for (; p + 4 <= k; p += 4)
                s = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p), _mm256_loadu_pd(brow + p), s);
            double r = hsum(s);
            for (; p < k; ++p) r += arow[p] * brow[p];
            if (acc)
                crow[j] += r;
            else
                crow[j] = r;
        }
    }
}

void relu_fwd_f32(std::size_t n, const float* x, float* y) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.f ? x[i] : 0.f;
}

void relu_fwd_f64(std::size_t n, const double* x, double* y) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_f32(std::size_t n, const float* x, const float* dy, float* dx) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), zero, _CMP_GT_OQ);
        const __m256 upd = _mm256_and_ps(mask, _mm256_loadu_ps(dy + i));
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), upd));
    }
    for (; i < n; ++i)
        if (x[i] > 0.f) dx[i] += dy[i];
}

void relu_bwd_f64(std::size_t n, const double* x, const double* dy, double* dx) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        const __m256d upd = _mm256_and_pd(mask, _mm256_loadu_pd(dy + i));
        _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), upd));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0) dx[i] += dy[i];
}

void axpy_f32(std::size_t n, float alpha, const float* x, float* y) {
    const __m256 av = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i),
                                                _mm256_loadu_ps(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpy_f64(std::size_t n, double alpha, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                                _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_inplace_f32(std::size_t n, const float* x, float* y) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

void add_inplace_f64(std::size_t n, const double* x, double* y) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

void add_scalar_f32(std::size_t n, float cst, float* y) {
    const __m256 cv = _mm256_set1_ps(cst);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), cv));
    for (; i < n; ++i) y[i] += cst;
}

void add_scalar_f64(std::size_t n, double cst, double* y) {
    const __m256d cv = _mm256_set1_pd(cst);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), cv));
    for (; i < n; ++i) y[i] += cst;
}

float sum_f32(std::size_t n, const float* x) {
    __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        s0 = _mm256_add_ps(s0, _mm256_loadu_ps(x + i));
        s1 = _mm256_add_ps(s1, _mm256_loadu_ps(x + i + 8));
    }
    float r = hsum(_mm256_add_ps(s0, s1));
    for (; i < n; ++i) r += x[i];
    return r;
}

double sum_f64(std::size_t n, const double* x) {
    __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 = _mm256_add_pd(s0, _mm256_loadu_pd(x + i));
        s1 = _mm256_add_pd(s1, _mm256_loadu_pd(x + i + 4));
    }
    double r = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) r += x[i];
    return r;
}

void sgdm_update_f32(std::size_t n, float* w, const float* g, float* v, float lr,
                     float momentum, float weight_decay) {
    const __m256 lrv = _mm256_set1_ps(lr);
    const __m256 mov = _mm256_set1_ps(momentum);
    const __m256 wdv = _mm256_set1_ps(weight_decay);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 wv = _mm256_loadu_ps(w + i);
        const __m256 grad = _mm256_fmadd_ps(wdv, wv, _mm256_loadu_ps(g + i));
        const __m256 vv = _mm256_fmadd_ps(mov, _mm256_loadu_ps(v + i), grad);
        _mm256_storeu_ps(v + i, vv);
        _mm256_storeu_ps(w + i, _mm256_fnmadd_ps(lrv, vv, wv));
    }
    for (; i < n; ++i) {
        const float grad = g[i] + weight_decay * w[i];
        v[i] = momentum * v[i] + grad;
        w[i] -= lr * v[i];
    }
}

void sgdm_update_f64(std::size_t n, double* w, const double* g, double* v, double lr,
                     double momentum, double weight_decay) {
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d mov = _mm256_set1_pd(momentum);
    const __m256d wdv = _mm256_set1_pd(weight_decay);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wv = _mm256_loadu_pd(w + i);
        const __m256d grad = _mm256_fmadd_pd(wdv, wv, _mm256_loadu_pd(g + i));
        const __m256d vv = _mm256_fmadd_pd(mov, _mm256_loadu_pd(v + i), grad);
        _mm256_storeu_pd(v + i, vv);
        _mm256_storeu_pd(w + i, _mm256_fnmadd_pd(lrv, vv, wv));
    }
    for (; i < n; ++i) {
        const double grad = g[i] + weight_decay * w[i];
        v[i] = momentum * v[i] + grad;
        w[i] -= lr * v[i];
    }
}

}  // namespace

const Ops<float>& avx2_f32() {
    static const Ops<float> table = [] {
        Ops<float> t{};
        t.gemm_nn = &gemm_nn_f32;
        t.gemm_nt = &gemm_nt_f32;
        t.gemm_tn = &gemm_tn_f32;
        t.relu_fwd = &relu_fwd_f32;
        t.relu_bwd = &relu_bwd_f32;
        t.axpy = &axpy_f32;
        t.add_inplace = &add_inplace_f32;
        t.add_scalar = &add_scalar_f32;
        t.sum = &sum_f32;
        t.sgdm_update = &sgdm_update_f32;
        return t;
    }();
    return table;
}

const Ops<double>& avx2_f64() {
    static const Ops<double> table = [] {
        Ops<double> t{};
        t.gemm_nn = &gemm_nn_f64;
        t.gemm_nt = &gemm_nt_f64;
        t.gemm_tn = &gemm_tn_f64;
        t.relu_fwd = &relu_fwd_f64;
        t.relu_bwd = &relu_bwd_f64;
        t.axpy = &axpy_f64;
        t.add_inplace = &add_inplace_f64;
        t.add_scalar = &add_scalar_f64;
        t.sum = &sum_f64;
        t.sgdm_update = &sgdm_update_f64;
        return t;
    }();
    return table;
}

}  // namespace floeberg::kern::detail
