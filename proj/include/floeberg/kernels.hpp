// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <cstddef>

namespace floeberg::kern {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

/// True when the running CPU supports the AVX2+FMA kernel set.
bool cpu_has_avx2();

/// Backend used by the unqualified ops<T>() accessor. Defaults to the widest
/// supported ISA; FLOEBERG_KERNELS=scalar|avx2 in the environment overrides.
Isa active_isa();

/// Pin the active backend (throws std::invalid_argument if unsupported here).
void force_isa(Isa isa);

/// Dense kernels over row-major buffers. ld* are row strides in elements.
/// Every function is deterministic for fixed inputs within one backend;
/// scalar and SIMD backends may differ by floating-point rounding only.
template <class T>
struct Ops {
    // C (+)= A[m,k] * B[k,n]
    void (*gemm_nn)(int m, int n, int k, const T* a, int lda, const T* b, int ldb,
                    T* c, int ldc, bool accumulate);
    // C (+)= A[m,k] * B[n,k]^T
    void (*gemm_nt)(int m, int n, int k, const T* a, int lda, const T* b, int ldb,
                    T* c, int ldc, bool accumulate);
    // C (+)= A[k,m]^T * B[k,n]
    void (*gemm_tn)(int m, int n, int k, const T* a, int lda, const T* b, int ldb,
                    T* c, int ldc, bool accumulate);

    void (*relu_fwd)(std::size_t n, const T* x, T* y);          // y = max(x, 0)
    void (*relu_bwd)(std::size_t n, const T* x, const T* dy, T* dx);  // dx += dy where x > 0
    void (*axpy)(std::size_t n, T alpha, const T* x, T* y);     // y += alpha * x
    void (*add_inplace)(std::size_t n, const T* x, T* y);       // y += x
    void (*add_scalar)(std::size_t n, T c, T* y);               // y += c
    T (*sum)(std::size_t n, const T* x);

    // v = momentum*v + (g + weight_decay*w); w -= lr*v
    void (*sgdm_update)(std::size_t n, T* w, const T* g, T* v, T lr, T momentum,
                        T weight_decay);
};

template <class T>
const Ops<T>& ops(Isa isa);

template <>
const Ops<float>& ops<float>(Isa isa);
template <>
const Ops<double>& ops<double>(Isa isa);

/// Kernel table for the active backend.
template <class T>
inline const Ops<T>& ops() {
    return ops<T>(active_isa());
}

}  // namespace floeberg::kern
