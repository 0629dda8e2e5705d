// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
//
// Reference kernels. Plain loops, no ISA assumptions; these define the
// semantics the SIMD variants are equivalence-tested against.

#include <algorithm>
#include <cstddef>

#include "floeberg/kernels.hpp"

namespace floeberg::kern::detail {

namespace {

template <class T>
void gemm_nn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
             int ldc, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::size_t>(i) * ldc;
        if (!accumulate) std::fill(crow, crow + n, T(0));
        const T* arow = a + static_cast<std::size_t>(i) * lda;
        for (int p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = b + static_cast<std::size_t>(p) * ldb;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void gemm_nt(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
             int ldc, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<std::size_t>(i) * lda;
        T* crow = c + static_cast<std::size_t>(i) * ldc;
        for (int j = 0; j < n; ++j) {
            const T* brow = b + static_cast<std::size_t>(j) * ldb;
            T acc = T(0);
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            if (accumulate)
                crow[j] += acc;
            else
                crow[j] = acc;
        }
    }
}

template <class T>
void gemm_tn(int m, int n, int k, const T* a, int lda, const T* b, int ldb, T* c,
             int ldc, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::size_t>(i) * ldc;
        if (!accumulate) std::fill(crow, crow + n, T(0));
        for (int p = 0; p < k; ++p) {
            const T av = a[static_cast<std::size_t>(p) * lda + i];
            const T* brow = b + static_cast<std::size_t>(p) * ldb;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void relu_fwd(std::size_t n, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <class T>
void relu_bwd(std::size_t n, const T* x, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > T(0)) dx[i] += dy[i];
}

template <class T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
void add_inplace(std::size_t n, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
}

template <class T>
void add_scalar(std::size_t n, T c, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c;
}

template <class T>
T sum(std::size_t n, const T* x) {
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

template <class T>
void sgdm_update(std::size_t n, T* w, const T* g, T* v, T lr, T momentum,
                 T weight_decay) {
    for (std::size_t i = 0; i < n; ++i) {
        const T grad = g[i] + weight_decay * w[i];
        v[i] = momentum * v[i] + grad;
        w[i] -= lr * v[i];
    }
}

template <class T>
constexpr Ops<T> make_table() {
    Ops<T> t{};
    t.gemm_nn = &gemm_nn<T>;
    t.gemm_nt = &gemm_nt<T>;
    t.gemm_tn = &gemm_tn<T>;
    t.relu_fwd = &relu_fwd<T>;
    t.relu_bwd = &relu_bwd<T>;
    t.axpy = &axpy<T>;
    t.add_inplace = &add_inplace<T>;
    t.add_scalar = &add_scalar<T>;
    t.sum = &sum<T>;
    t.sgdm_update = &sgdm_update<T>;
    return t;
}

}  // namespace

const Ops<float>& scalar_f32() {
    static const Ops<float> table = make_table<float>();
    return table;
}

const Ops<double>& scalar_f64() {
    static const Ops<double> table = make_table<double>();
    return table;
}

}  // namespace floeberg::kern::detail
