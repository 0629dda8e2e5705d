// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 Floeberg Authors
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "floeberg/check.hpp"
#include "floeberg/kernels.hpp"
#include "floeberg/tensor.hpp"

namespace floeberg::ad {

/// A trainable tensor with its accumulated gradient.
template <class T>
struct Parameter {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;

    Parameter(std::string n, Tensor<T> v)
        : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}

    void zero_grad() { grad.fill(T(0)); }
};

/// Handle to a node on a Tape.
struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
};

/// Reverse-mode tape. Operations append nodes in execution order; inputs
/// always precede outputs, so walking the node list backwards visits nodes in
/// anti-topological order exactly once.
///
/// A tape and its tensors are a single-owner unit: one forward pass, one
/// backward pass. Replaying identical inputs yields bitwise identical values
/// and gradients.
template <class T>
class Tape {
public:
    using BackFn = std::function<void(Tape&, int out_id)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // ---- node construction -------------------------------------------------

    Var leaf(Tensor<T> value, bool needs_grad = false) {
        return push(std::move(value), needs_grad, nullptr, {});
    }

    /// Leaf bound to a Parameter; backward() accumulates into p.grad.
    Var param(Parameter<T>& p) {
        Var v = push(Tensor<T>(p.value), true, nullptr, {});
        bindings_.push_back({v.id, &p});
        return v;
    }

    /// Extension point for fused operations with a custom backward pass.
    Var make_node(Tensor<T> value, std::vector<Var> inputs, BackFn back) {
        bool needs = false;
        std::vector<int> in_ids;
        in_ids.reserve(inputs.size());
        for (Var v : inputs) {
            check_var(v);
            needs = needs || nodes_[v.id].needs_grad;
            in_ids.push_back(v.id);
        }
        return push(std::move(value), needs, needs ? std::move(back) : nullptr,
                    std::move(in_ids));
    }

    // ---- accessors ---------------------------------------------------------

    const Tensor<T>& value(Var v) const {
        check_var(v);
        return nodes_[v.id].value;
    }

    /// Gradient of a node after backward(). Throws if the node does not
    /// participate in differentiation.
    const Tensor<T>& grad(Var v) const {
        check_var(v);
        FLB_REQUIRE(backward_done_, "Tape::grad: backward() has not run");
        FLB_REQUIRE(nodes_[v.id].needs_grad, "Tape::grad: node has no gradient");
        return nodes_[v.id].grad;
    }

    bool wants_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].needs_grad; }
    const Tensor<T>& node_value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
    Tensor<T>& grad_of(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }
    std::size_t size() const { return nodes_.size(); }

    // ---- elementwise and reduction ops -------------------------------------

    Var add(Var a, Var b) {
        const Tensor<T>& av = value(a);
        const Tensor<T>& bv = value(b);
        FLB_REQUIRE(av.same_shape(bv), "add: shape mismatch");
        Tensor<T> out(av);
        kern::ops<T>().add_inplace(out.numel(), bv.data(), out.data());
        const int aid = a.id, bid = b.id;
        return make_node(std::move(out), {a, b}, [aid, bid](Tape& t, int oid) {
            const Tensor<T>& g = t.grad_of(oid);
            if (t.wants_grad(aid))
                kern::ops<T>().add_inplace(g.numel(), g.data(), t.grad_of(aid).data());
            if (t.wants_grad(bid))
                kern::ops<T>().add_inplace(g.numel(), g.data(), t.grad_of(bid).data());
        });
    }

    Var mul(Var a, Var b) {
        const Tensor<T>& av = value(a);
        const Tensor<T>& bv = value(b);
        FLB_REQUIRE(av.same_shape(bv), "mul: shape mismatch");
        Tensor<T> out(av.shape());
        for (std::size_t i = 0; i < out.numel(); ++i) out[i] = av[i] * bv[i];
        const int aid = a.id, bid = b.id;
        return make_node(std::move(out), {a, b}, [aid, bid](Tape& t, int oid) {
            const Tensor<T>& g = t.grad_of(oid);
            const Tensor<T>& av2 = t.node_value(aid);
            const Tensor<T>& bv2 = t.node_value(bid);
            if (t.wants_grad(aid)) {
                Tensor<T>& ga = t.grad_of(aid);
                for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * bv2[i];
            }
            if (t.wants_grad(bid)) {
                Tensor<T>& gb = t.grad_of(bid);
                for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i] * av2[i];
            }
        });
    }

    Var scale(Var a, T s) {
        const Tensor<T>& av = value(a);
        Tensor<T> out(av.shape());
        kern::ops<T>().axpy(out.numel(), s, av.data(), out.data());
        const int aid = a.id;
        return make_node(std::move(out), {a}, [aid, s](Tape& t, int oid) {
            if (t.wants_grad(aid))
                kern::ops<T>().axpy(t.grad_of(oid).numel(), s, t.grad_of(oid).data(),
                                    t.grad_of(aid).data());
        });
    }

    Var sum(Var a) {
        const Tensor<T>& av = value(a);
        Tensor<T> out = Tensor<T>::scalar(kern::ops<T>().sum(av.numel(), av.data()));
        const int aid = a.id;
        return make_node(std::move(out), {a}, [aid](Tape& t, int oid) {
            if (t.wants_grad(aid)) {
                Tensor<T>& ga = t.grad_of(aid);
                kern::ops<T>().add_scalar(ga.numel(), t.grad_of(oid)[0], ga.data());
            }
        });
    }

    Var relu(Var x) {
        const Tensor<T>& xv = value(x);
        Tensor<T> out(xv.shape());
        kern::ops<T>().relu_fwd(out.numel(), xv.data(), out.data());
        const int xid = x.id;
        return make_node(std::move(out), {x}, [xid](Tape& t, int oid) {
            if (t.wants_grad(xid))
                kern::ops<T>().relu_bwd(t.grad_of(oid).numel(), t.node_value(xid).data(),
                                        t.grad_of(oid).data(), t.grad_of(xid).data());
        });
    }

    // ---- structural ops -----------------------------------------------------

    /// Channel concatenation (a first). Shapes must agree on B, H, W.
    Var concat_channels(Var a, Var b) {
        const Tensor<T>& av = value(a);
        const Tensor<T>& bv = value(b);
        FLB_REQUIRE(av.ndim() == 4 && bv.ndim() == 4, "concat_channels: need 4-D inputs");
        FLB_REQUIRE(av.dim(0) == bv.dim(0) && av.dim(2) == bv.dim(2) && av.dim(3) == bv.dim(3),
                    "concat_channels: B/H/W mismatch");
        const int batch = av.dim(0), ca = av.dim(1), cb = bv.dim(1);
        const std::size_t hw = static_cast<std::size_t>(av.dim(2)) * av.dim(3);
        Tensor<T> out({batch, ca + cb, av.dim(2), av.dim(3)});
        for (int i = 0; i < batch; ++i) {
            std::memcpy(out.data() + (static_cast<std::size_t>(i) * (ca + cb)) * hw,
                        av.data() + static_cast<std::size_t>(i) * ca * hw,
                        sizeof(T) * ca * hw);
            std::memcpy(out.data() + (static_cast<std::size_t>(i) * (ca + cb) + ca) * hw,
                        bv.data() + static_cast<std::size_t>(i) * cb * hw,
                        sizeof(T) * cb * hw);
        }
        const int aid = a.id, bid = b.id;
        return make_node(std::move(out), {a, b},
                         [aid, bid, batch, ca, cb, hw](Tape& t, int oid) {
                             const Tensor<T>& g = t.grad_of(oid);
                             const auto& K = kern::ops<T>();
                             for (int i = 0; i < batch; ++i) {
                                 const T* gi = g.data() + (static_cast<std::size_t>(i) * (ca + cb)) * hw;
                                 if (t.wants_grad(aid))
                                     K.add_inplace(static_cast<std::size_t>(ca) * hw, gi,
                                                   t.grad_of(aid).data() + static_cast<std::size_t>(i) * ca * hw);
                                 if (t.wants_grad(bid))
                                     K.add_inplace(static_cast<std::size_t>(cb) * hw,
                                                   gi + static_cast<std::size_t>(ca) * hw,
                                                   t.grad_of(bid).data() + static_cast<std::size_t>(i) * cb * hw);
                             }
                         });
    }

    /// 2x2 max pooling, stride 2. Gradient routes to the argmax; ties take the
    /// first element in (0,0),(0,1),(1,0),(1,1) scan order.
    Var maxpool2x2(Var x) {
        const Tensor<T>& xv = value(x);
        FLB_REQUIRE(xv.ndim() == 4, "maxpool2x2: need 4-D input");
        const int batch = xv.dim(0), ch = xv.dim(1), h = xv.dim(2), w = xv.dim(3);
        FLB_REQUIRE(h % 2 == 0 && w % 2 == 0, "maxpool2x2: spatial dims must be even, got ",
                    h, "x", w);
        const int oh = h / 2, ow = w / 2;
        Tensor<T> out({batch, ch, oh, ow});
        auto argmax = std::make_shared<std::vector<std::int64_t>>(out.numel());
        std::size_t o = 0;
        for (int i = 0; i < batch; ++i) {
            for (int c = 0; c < ch; ++c) {
                const T* plane = xv.data() + (static_cast<std::size_t>(i) * ch + c) *
                                                 static_cast<std::size_t>(h) * w;
                const std::size_t base = (static_cast<std::size_t>(i) * ch + c) *
                                         static_cast<std::size_t>(h) * w;
                for (int r = 0; r < oh; ++r) {
                    for (int q = 0; q < ow; ++q, ++o) {
                        const std::size_t p00 = static_cast<std::size_t>(2 * r) * w + 2 * q;
                        std::size_t best = p00;
                        T bv = plane[p00];
                        const std::size_t cand[3] = {p00 + 1, p00 + w, p00 + w + 1};
                        for (std::size_t cc : cand) {
                            if (plane[cc] > bv) {
                                bv = plane[cc];
                                best = cc;
                            }
                        }
                        out[o] = bv;
                        (*argmax)[o] = static_cast<std::int64_t>(base + best);
                    }
                }
            }
        }
        const int xid = x.id;
        return make_node(std::move(out), {x}, [xid, argmax](Tape& t, int oid) {
            if (!t.wants_grad(xid)) return;
            const Tensor<T>& g = t.grad_of(oid);
            Tensor<T>& gx = t.grad_of(xid);
            for (std::size_t i = 0; i < g.numel(); ++i)
                gx[static_cast<std::size_t>((*argmax)[i])] += g[i];
        });
    }

    /// Per-pixel softmax across the channel axis, max-subtracted for stability.
    Var softmax_channels(Var x) {
        const Tensor<T>& xv = value(x);
        FLB_REQUIRE(xv.ndim() == 4, "softmax_channels: need 4-D input");
        const int batch = xv.dim(0), ch = xv.dim(1);
        const std::size_t hw = static_cast<std::size_t>(xv.dim(2)) * xv.dim(3);
        Tensor<T> out(xv.shape());
        for (int i = 0; i < batch; ++i) {
            const T* xi = xv.data() + static_cast<std::size_t>(i) * ch * hw;
            T* oi = out.data() + static_cast<std::size_t>(i) * ch * hw;
            for (std::size_t p = 0; p < hw; ++p) {
                T mx = xi[p];
                for (int c = 1; c < ch; ++c) mx = std::max(mx, xi[c * hw + p]);
                T denom = T(0);
                for (int c = 0; c < ch; ++c) {
                    const T e = std::exp(xi[c * hw + p] - mx);
                    oi[c * hw + p] = e;
                    denom += e;
                }
                const T inv = T(1) / denom;
                for (int c = 0; c < ch; ++c) oi[c * hw + p] *= inv;
            }
        }
        const int xid = x.id;
        return make_node(std::move(out), {x}, [xid, batch, ch, hw](Tape& t, int oid) {
            if (!t.wants_grad(xid)) return;
            const Tensor<T>& y = t.node_value(oid);
            const Tensor<T>& g = t.grad_of(oid);
            Tensor<T>& gx = t.grad_of(xid);
            for (int i = 0; i < batch; ++i) {
                const std::size_t off = static_cast<std::size_t>(i) * ch * hw;
                for (std::size_t p = 0; p < hw; ++p) {
                    T dot = T(0);
                    for (int c = 0; c < ch; ++c)
                        dot += g[off + c * hw + p] * y[off + c * hw + p];
                    for (int c = 0; c < ch; ++c)
                        gx[off + c * hw + p] +=
                            y[off + c * hw + p] * (g[off + c * hw + p] - dot);
                }
            }
        });
    }

    // ---- convolutions -------------------------------------------------------

    /// Stride-1 cross-correlation with zero same-padding and per-channel bias.
    /// x: [B,Cin,H,W], w: [Cout,Cin,k,k] (k odd), b: [Cout] -> [B,Cout,H,W].
    Var conv2d(Var x, Var w, Var b) {
        const Tensor<T>& xv = value(x);
        const Tensor<T>& wv = value(w);
        const Tensor<T>& bv = value(b);
        FLB_REQUIRE(xv.ndim() == 4 && wv.ndim() == 4 && bv.ndim() == 1,
                    "conv2d: x must be 4-D, w 4-D, b 1-D");
        const int batch = xv.dim(0), cin = xv.dim(1), h = xv.dim(2), ww = xv.dim(3);
        const int cout = wv.dim(0), kk = wv.dim(2);
        FLB_REQUIRE(wv.dim(1) == cin, "conv2d: weight Cin ", wv.dim(1),
                    " does not match input channels ", cin);
        FLB_REQUIRE(wv.dim(3) == kk && kk % 2 == 1, "conv2d: kernel must be square and odd");
        FLB_REQUIRE(bv.dim(0) == cout, "conv2d: bias size mismatch");

        const auto& K = kern::ops<T>();
        const std::size_t hw = static_cast<std::size_t>(h) * ww;
        const int ckk = cin * kk * kk;
        Tensor<T> out({batch, cout, h, ww});
        std::vector<T> col;
        if (kk > 1) col.resize(static_cast<std::size_t>(ckk) * hw);
        for (int i = 0; i < batch; ++i) {
            const T* xi = xv.data() + static_cast<std::size_t>(i) * cin * hw;
            T* oi = out.data() + static_cast<std::size_t>(i) * cout * hw;
            if (kk == 1) {
                K.gemm_nn(cout, static_cast<int>(hw), cin, wv.data(), cin, xi,
                          static_cast<int>(hw), oi, static_cast<int>(hw), false);
            } else {
                detail_im2col(xi, cin, h, ww, kk, col.data());
                K.gemm_nn(cout, static_cast<int>(hw), ckk, wv.data(), ckk, col.data(),
                          static_cast<int>(hw), oi, static_cast<int>(hw), false);
            }
            for (int c = 0; c < cout; ++c) K.add_scalar(hw, bv[c], oi + c * hw);
        }

        const int xid = x.id, wid = w.id, bid = b.id;
        return make_node(
            std::move(out), {x, w, b},
            [xid, wid, bid, batch, cin, cout, h, ww, kk](Tape& t, int oid) {
                const auto& Kk = kern::ops<T>();
                const Tensor<T>& gy = t.grad_of(oid);
                const Tensor<T>& xv2 = t.node_value(xid);
                const Tensor<T>& wv2 = t.node_value(wid);
                const std::size_t hw2 = static_cast<std::size_t>(h) * ww;
                const int ckk2 = cin * kk * kk;
                if (t.wants_grad(bid)) {
                    Tensor<T>& gb = t.grad_of(bid);
                    for (int i = 0; i < batch; ++i) {
                        const T* gyi = gy.data() + static_cast<std::size_t>(i) * cout * hw2;
                        for (int c = 0; c < cout; ++c) gb[c] += Kk.sum(hw2, gyi + c * hw2);
                    }
                }
                std::vector<T> col2;
                if (kk > 1 && (t.wants_grad(wid) || t.wants_grad(xid)))
                    col2.resize(static_cast<std::size_t>(ckk2) * hw2);
                for (int i = 0; i < batch; ++i) {
                    const T* xi = xv2.data() + static_cast<std::size_t>(i) * cin * hw2;
                    const T* gyi = gy.data() + static_cast<std::size_t>(i) * cout * hw2;
                    if (t.wants_grad(wid)) {
                        Tensor<T>& gw = t.grad_of(wid);
                        if (kk == 1) {
                            Kk.gemm_nt(cout, cin, static_cast<int>(hw2), gyi,
                                       static_cast<int>(hw2), xi, static_cast<int>(hw2),
                                       gw.data(), cin, true);
                        } else {
                            detail_im2col(xi, cin, h, ww, kk, col2.data());
                            Kk.gemm_nt(cout, ckk2, static_cast<int>(hw2), gyi,
                                       static_cast<int>(hw2), col2.data(),
                                       static_cast<int>(hw2), gw.data(), ckk2, true);
                        }
                    }
                    if (t.wants_grad(xid)) {
                        Tensor<T>& gx = t.grad_of(xid);
                        T* gxi = gx.data() + static_cast<std::size_t>(i) * cin * hw2;
                        if (kk == 1) {
                            Kk.gemm_tn(cin, static_cast<int>(hw2), cout, wv2.data(), cin,
                                       gyi, static_cast<int>(hw2), gxi,
                                       static_cast<int>(hw2), true);
                        } else {
                            Kk.gemm_tn(ckk2, static_cast<int>(hw2), cout, wv2.data(), ckk2,
                                       gyi, static_cast<int>(hw2), col2.data(),
                                       static_cast<int>(hw2), false);
                            detail_col2im_add(col2.data(), cin, h, ww, kk, gxi);
                        }
                    }
                }
            });
    }

    /// Transposed convolution, kernel 2, stride 2: the adjoint of a stride-2
    /// k=2 convolution. x: [B,Cin,H,W], w: [Cin,Cout,2,2], b: [Cout]
    /// -> [B,Cout,2H,2W].
    Var conv_transpose2d(Var x, Var w, Var b) {
        const Tensor<T>& xv = value(x);
        const Tensor<T>& wv = value(w);
        const Tensor<T>& bv = value(b);
        FLB_REQUIRE(xv.ndim() == 4 && wv.ndim() == 4 && bv.ndim() == 1,
                    "conv_transpose2d: x must be 4-D, w 4-D, b 1-D");
        const int batch = xv.dim(0), cin = xv.dim(1), h = xv.dim(2), ww = xv.dim(3);
        const int cout = wv.dim(1);
        FLB_REQUIRE(wv.dim(0) == cin, "conv_transpose2d: weight Cin mismatch");
        FLB_REQUIRE(wv.dim(2) == 2 && wv.dim(3) == 2, "conv_transpose2d: kernel must be 2x2");
        FLB_REQUIRE(bv.dim(0) == cout, "conv_transpose2d: bias size mismatch");

        const auto& K = kern::ops<T>();
        const std::size_t hw = static_cast<std::size_t>(h) * ww;
        const int cout4 = cout * 4;
        Tensor<T> out({batch, cout, 2 * h, 2 * ww});
        std::vector<T> blocks(static_cast<std::size_t>(cout4) * hw);
        for (int i = 0; i < batch; ++i) {
            const T* xi = xv.data() + static_cast<std::size_t>(i) * cin * hw;
            K.gemm_tn(cout4, static_cast<int>(hw), cin, wv.data(), cout4, xi,
                      static_cast<int>(hw), blocks.data(), static_cast<int>(hw), false);
            T* oi = out.data() + static_cast<std::size_t>(i) * cout * (4 * hw);
            for (int c = 0; c < cout; ++c) {
                const T bias = bv[c];
                for (int a = 0; a < 2; ++a) {
                    for (int b2 = 0; b2 < 2; ++b2) {
                        const T* src = blocks.data() +
                                       (static_cast<std::size_t>(c) * 4 + a * 2 + b2) * hw;
                        for (int r = 0; r < h; ++r) {
                            T* dst = oi + (static_cast<std::size_t>(c) * 2 * h + 2 * r + a) *
                                              (2 * ww) +
                                     b2;
                            const T* s = src + static_cast<std::size_t>(r) * ww;
                            for (int q = 0; q < ww; ++q) dst[2 * q] = s[q] + bias;
                        }
                    }
                }
            }
        }

        const int xid = x.id, wid = w.id, bid = b.id;
        return make_node(
            std::move(out), {x, w, b},
            [xid, wid, bid, batch, cin, cout, h, ww](Tape& t, int oid) {
                const auto& Kk = kern::ops<T>();
                const Tensor<T>& gy = t.grad_of(oid);
                const Tensor<T>& xv2 = t.node_value(xid);
                const Tensor<T>& wv2 = t.node_value(wid);
                const std::size_t hw2 = static_cast<std::size_t>(h) * ww;
                const int cout4 = cout * 4;
                if (t.wants_grad(bid)) {
                    Tensor<T>& gb = t.grad_of(bid);
                    for (int i = 0; i < batch; ++i) {
                        const T* gyi = gy.data() + static_cast<std::size_t>(i) * cout * 4 * hw2;
                        for (int c = 0; c < cout; ++c) gb[c] += Kk.sum(4 * hw2, gyi + c * 4 * hw2);
                    }
                }
                if (!t.wants_grad(xid) && !t.wants_grad(wid)) return;
                std::vector<T> dblocks(static_cast<std::size_t>(cout4) * hw2);
                for (int i = 0; i < batch; ++i) {
                    const T* gyi = gy.data() + static_cast<std::size_t>(i) * cout * 4 * hw2;
                    for (int c = 0; c < cout; ++c) {
                        for (int a = 0; a < 2; ++a) {
                            for (int b2 = 0; b2 < 2; ++b2) {
                                T* dst = dblocks.data() +
                                         (static_cast<std::size_t>(c) * 4 + a * 2 + b2) * hw2;
                                for (int r = 0; r < h; ++r) {
                                    const T* s = gyi + (static_cast<std::size_t>(c) * 2 * h +
                                                        2 * r + a) *
                                                           (2 * ww) +
                                                 b2;
                                    T* d = dst + static_cast<std::size_t>(r) * ww;
                                    for (int q = 0; q < ww; ++q) d[q] = s[2 * q];
                                }
                            }
                        }
                    }
                    const T* xi = xv2.data() + static_cast<std::size_t>(i) * cin * hw2;
                    if (t.wants_grad(wid))
                        Kk.gemm_nt(cin, cout4, static_cast<int>(hw2), xi,
                                   static_cast<int>(hw2), dblocks.data(),
                                   static_cast<int>(hw2), t.grad_of(wid).data(), cout4, true);
                    if (t.wants_grad(xid))
                        Kk.gemm_nn(cin, static_cast<int>(hw2), cout4, wv2.data(), cout4,
                                   dblocks.data(), static_cast<int>(hw2),
                                   t.grad_of(xid).data() + static_cast<std::size_t>(i) * cin * hw2,
                                   static_cast<int>(hw2), true);
                }
            });
    }

    // ---- backward -----------------------------------------------------------

    /// Reverse pass from a scalar root. Accumulates into every bound
    /// Parameter's grad. May be called once per tape.
    void backward(Var root) {
        check_var(root);
        FLB_REQUIRE(value(root).numel() == 1, "backward: root must be a scalar");
        FLB_REQUIRE(!backward_done_, "backward: already run on this tape");
        backward_done_ = true;
        for (int i = 0; i <= root.id; ++i) {
            Node& n = nodes_[static_cast<std::size_t>(i)];
            if (n.needs_grad) n.grad = Tensor<T>(n.value.shape());
        }
        if (nodes_[static_cast<std::size_t>(root.id)].needs_grad)
            nodes_[static_cast<std::size_t>(root.id)].grad[0] = T(1);
        for (int i = root.id; i >= 0; --i) {
            Node& n = nodes_[static_cast<std::size_t>(i)];
            if (n.needs_grad && n.back) n.back(*this, i);
        }
        for (const auto& [id, p] : bindings_) {
            if (id > root.id) continue;
            const Tensor<T>& g = nodes_[static_cast<std::size_t>(id)].grad;
            kern::ops<T>().add_inplace(g.numel(), g.data(), p->grad.data());
        }
    }

private:
    struct Node {
        Tensor<T> value;
        Tensor<T> grad;
        std::vector<int> inputs;
        BackFn back;
        bool needs_grad = false;
    };

    void check_var(Var v) const {
        FLB_REQUIRE(v.id >= 0 && static_cast<std::size_t>(v.id) < nodes_.size(),
                    "invalid Var handle");
    }

    Var push(Tensor<T> value, bool needs_grad, BackFn back, std::vector<int> inputs) {
        Node n;
        n.value = std::move(value);
        n.needs_grad = needs_grad;
        n.back = std::move(back);
        n.inputs = std::move(inputs);
        nodes_.push_back(std::move(n));
        return Var{static_cast<int>(nodes_.size()) - 1};
    }

    // im2col for stride-1 same-padded odd kernels; col is [cin*k*k, h*w].
    static void detail_im2col(const T* x, int cin, int h, int w, int k, T* col) {
        const int pad = k / 2;
        const std::size_t hw = static_cast<std::size_t>(h) * w;
        std::size_t row = 0;
        for (int c = 0; c < cin; ++c) {
            const T* plane = x + static_cast<std::size_t>(c) * hw;
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - pad;
                for (int kx = 0; kx < k; ++kx, ++row) {
                    const int dx = kx - pad;
                    T* dst = col + row * hw;
                    const int x0 = dx < 0 ? -dx : 0;
                    const int x1 = dx > 0 ? w - dx : w;
                    for (int oy = 0; oy < h; ++oy, dst += w) {
                        const int iy = oy + dy;
                        if (iy < 0 || iy >= h) {
                            std::memset(dst, 0, sizeof(T) * static_cast<std::size_t>(w));
                            continue;
                        }
                        if (x0 > 0) std::memset(dst, 0, sizeof(T) * static_cast<std::size_t>(x0));
                        if (x1 < w)
                            std::memset(dst + x1, 0, sizeof(T) * static_cast<std::size_t>(w - x1));
                        if (x1 > x0)
                            std::memcpy(dst + x0,
                                        plane + static_cast<std::size_t>(iy) * w + x0 + dx,
                                        sizeof(T) * static_cast<std::size_t>(x1 - x0));
                    }
                }
            }
        }
    }

    // Adjoint of detail_im2col: scatter-add col rows back into the image.
    static void detail_col2im_add(const T* col, int cin, int h, int w, int k, T* dx) {
        const int pad = k / 2;
        const std::size_t hw = static_cast<std::size_t>(h) * w;
        std::size_t row = 0;
        for (int c = 0; c < cin; ++c) {
            T* plane = dx + static_cast<std::size_t>(c) * hw;
            for (int ky = 0; ky < k; ++ky) {
                const int dy = ky - pad;
                for (int kx = 0; kx < k; ++kx, ++row) {
                    const int dx2 = kx - pad;
                    const T* src = col + row * hw;
                    const int x0 = dx2 < 0 ? -dx2 : 0;
                    const int x1 = dx2 > 0 ? w - dx2 : w;
                    for (int oy = 0; oy < h; ++oy) {
                        const int iy = oy + dy;
                        if (iy < 0 || iy >= h || x1 <= x0) continue;
                        T* d = plane + static_cast<std::size_t>(iy) * w + x0 + dx2;
                        const T* s = src + static_cast<std::size_t>(oy) * w + x0;
                        kern::ops<T>().add_inplace(static_cast<std::size_t>(x1 - x0), s, d);
                    }
                }
            }
        }
    }

    std::vector<Node> nodes_;
    std::vector<std::pair<int, Parameter<T>*>> bindings_;
    bool backward_done_ = false;
};

}  // namespace floeberg::ad
