// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "floeberg/check.hpp"

namespace floeberg::ad {

/// Dense row-major tensor of up to 4 dimensions (batch, channel, height, width).
template <class T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        FLB_REQUIRE(!shape_.empty() && shape_.size() <= 4,
                    "Tensor: rank must be 1..4, got ", shape_.size());
        std::size_t n = 1;
        for (int d : shape_) {
            FLB_REQUIRE(d > 0, "Tensor: dimensions must be positive");
            n *= static_cast<std::size_t>(d);
        }
        data_.assign(n, T(0));
    }

    Tensor(std::vector<int> shape, std::vector<T> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        FLB_REQUIRE(!shape_.empty() && shape_.size() <= 4,
                    "Tensor: rank must be 1..4, got ", shape_.size());
        std::size_t n = 1;
        for (int d : shape_) {
            FLB_REQUIRE(d > 0, "Tensor: dimensions must be positive");
            n *= static_cast<std::size_t>(d);
        }
        FLB_REQUIRE(n == data_.size(), "Tensor: data length ", data_.size(),
                    " does not match shape product ", n);
    }

    static Tensor scalar(T v) { return Tensor({1}, {v}); }

    static Tensor full(std::vector<int> shape, T v) {
        Tensor t(std::move(shape));
        for (auto& e : t.data_) e = v;
        return t;
    }

    int ndim() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& shape() const { return shape_; }
    std::size_t numel() const { return data_.size(); }
    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at(int a) { return data_[static_cast<std::size_t>(a)]; }
    T& at(int a, int b) { return data_[idx2(a, b)]; }
    T& at(int a, int b, int c) { return data_[idx3(a, b, c)]; }
    T& at(int a, int b, int c, int d) { return data_[idx4(a, b, c, d)]; }
    const T& at(int a) const { return data_[static_cast<std::size_t>(a)]; }
    const T& at(int a, int b) const { return data_[idx2(a, b)]; }
    const T& at(int a, int b, int c) const { return data_[idx3(a, b, c)]; }
    const T& at(int a, int b, int c, int d) const { return data_[idx4(a, b, c, d)]; }

    void fill(T v) {
        for (auto& e : data_) e = v;
    }

private:
    std::size_t idx2(int a, int b) const {
        return static_cast<std::size_t>(a) * shape_[1] + b;
    }
    std::size_t idx3(int a, int b, int c) const {
        return (static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] + c;
    }
    std::size_t idx4(int a, int b, int c, int d) const {
        return ((static_cast<std::size_t>(a) * shape_[1] + b) * shape_[2] + c) * shape_[3] + d;
    }

    std::vector<int> shape_;
    std::vector<T> data_;
};

}  // namespace floeberg::ad
