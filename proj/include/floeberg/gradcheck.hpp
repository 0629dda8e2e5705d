// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include "floeberg/tape.hpp"
#include "floeberg/tensor.hpp"

namespace floeberg::ad {

struct GradCheckReport {
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
    std::size_t worst_index = 0;
    std::size_t checked = 0;
    bool ok = false;
};

/// Compares the tape gradient of a scalar function against central finite
/// differences, coordinate by coordinate.
///
/// f must be a pure function: (Tape&, Var leaf) -> scalar Var. Coordinates
/// where both gradients are below 1e-10 in magnitude are counted as matching.
template <class T, class F>
GradCheckReport grad_check(F&& f, const Tensor<T>& x, double tol, double h = 1e-5) {
    GradCheckReport rep;

    Tensor<T> analytic;
    {
        Tape<T> tape;
        Var leaf = tape.leaf(x, /*needs_grad=*/true);
        Var loss = f(tape, leaf);
        tape.backward(loss);
        analytic = tape.grad(leaf);
    }

    auto eval = [&](const Tensor<T>& point) -> double {
        Tape<T> tape;
        Var leaf = tape.leaf(point, false);
        Var loss = f(tape, leaf);
        return static_cast<double>(tape.value(loss)[0]);
    };

    Tensor<T> probe(x);
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const T orig = probe[i];
        probe[i] = orig + static_cast<T>(h);
        const double fp = eval(probe);
        probe[i] = orig - static_cast<T>(h);
        const double fm = eval(probe);
        probe[i] = orig;

        const double numeric = (fp - fm) / (2.0 * h);
        const double a = static_cast<double>(analytic[i]);
        const double abs_err = std::abs(a - numeric);
        const double denom = std::max(std::abs(a), std::abs(numeric));
        const double rel = denom < 1e-10 ? 0.0 : abs_err / denom;
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.worst_index = i;
        }
        rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
        ++rep.checked;
    }
    rep.ok = rep.max_rel_err < tol;
    return rep;
}

}  // namespace floeberg::ad
