#pragma once

#include <cmath>

#include "awnet/rng.hpp"
#include "awnet/tensor.hpp"

namespace awnet {

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
    Tensor<T> y = Tensor<T>::zeros_like(x);
    for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = x.data()[i] > T(0) ? x.data()[i] : T(0);
    return y;
}

// gx from gy and the relu *output* (y > 0 iff pre-activation > 0).
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& gy, const Tensor<T>& y) {
    Tensor<T> gx = Tensor<T>::zeros_like(gy);
    for (std::size_t i = 0; i < gy.size(); ++i) gx.data()[i] = y.data()[i] > T(0) ? gy.data()[i] : T(0);
    return gx;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    Tensor<T> y = Tensor<T>::zeros_like(x);
    for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = T(1) / (T(1) + std::exp(-x.data()[i]));
    return y;
}

template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& gy, const Tensor<T>& y) {
    Tensor<T> gx = Tensor<T>::zeros_like(gy);
    for (std::size_t i = 0; i < gy.size(); ++i) gx.data()[i] = gy.data()[i] * y.data()[i] * (T(1) - y.data()[i]);
    return gx;
}

// Channel dropout (whole feature maps zeroed, survivors scaled by 1/(1-p)),
// matching the Dropout2d convention of the backbone lineage.
template <typename T>
struct DropoutMask {
    std::vector<T> scale;  // one factor per (n, c)
    int c = 0;
};

template <typename T>
Tensor<T> spatial_dropout(const Tensor<T>& x, T rate, Rng& rng, DropoutMask<T>& mask) {
    Tensor<T> y = Tensor<T>::zeros_like(x);
    mask.c = x.c();
    mask.scale.assign(static_cast<std::size_t>(x.n()) * x.c(), T(0));
    const T keep = T(1) - rate;
    const std::size_t plane = x.plane();
    for (int n = 0; n < x.n(); ++n)
        for (int c = 0; c < x.c(); ++c) {
            const T s = (rate <= T(0) || rng.uniform() >= rate) ? T(1) / keep : T(0);
            mask.scale[static_cast<std::size_t>(n) * x.c() + c] = rate <= T(0) ? T(1) : s;
            const T* p = x.sample(n) + c * plane;
            T* q = y.sample(n) + c * plane;
            const T f = mask.scale[static_cast<std::size_t>(n) * x.c() + c];
            for (std::size_t i = 0; i < plane; ++i) q[i] = p[i] * f;
        }
    return y;
}

template <typename T>
Tensor<T> spatial_dropout_backward(const Tensor<T>& gy, const DropoutMask<T>& mask) {
    Tensor<T> gx = Tensor<T>::zeros_like(gy);
    const std::size_t plane = gy.plane();
    for (int n = 0; n < gy.n(); ++n)
        for (int c = 0; c < gy.c(); ++c) {
            const T f = mask.scale[static_cast<std::size_t>(n) * gy.c() + c];
            const T* p = gy.sample(n) + c * plane;
            T* q = gx.sample(n) + c * plane;
            for (std::size_t i = 0; i < plane; ++i) q[i] = p[i] * f;
        }
    return gx;
}

// y = a .* b_broadcast where b has one channel broadcast across a's channels.
template <typename T>
Tensor<T> mul_broadcast_c(const Tensor<T>& a, const Tensor<T>& b1) {
    Tensor<T> y = Tensor<T>::zeros_like(a);
    const std::size_t plane = a.plane();
    for (int n = 0; n < a.n(); ++n) {
        const T* bp = b1.sample(n);
        for (int c = 0; c < a.c(); ++c) {
            const T* ap = a.sample(n) + c * plane;
            T* yp = y.sample(n) + c * plane;
            for (std::size_t i = 0; i < plane; ++i) yp[i] = ap[i] * bp[i];
        }
    }
    return y;
}

// Reduces a full tensor against a broadcast factor: g_b1[n, 0, h, w] = sum_c gy .* a.
template <typename T>
Tensor<T> mul_broadcast_c_backward_b(const Tensor<T>& gy, const Tensor<T>& a) {
    Tensor<T> gb(a.n(), 1, a.h(), a.w());
    const std::size_t plane = a.plane();
    for (int n = 0; n < a.n(); ++n) {
        T* gp = gb.sample(n);
        for (int c = 0; c < a.c(); ++c) {
            const T* ap = a.sample(n) + c * plane;
            const T* gyp = gy.sample(n) + c * plane;
            for (std::size_t i = 0; i < plane; ++i) gp[i] += gyp[i] * ap[i];
        }
    }
    return gb;
}

}  // namespace awnet
