#pragma once

#include <cmath>
#include <utility>

#include "awnet/errors.hpp"
#include "awnet/tensor.hpp"

namespace awnet {

inline constexpr double kBceEps = 1e-7;

// Mean binary cross-entropy over every element:
//   L_i = -y_i log(p_i) - (1 - y_i) log(1 - p_i)
// Predictions are clamped to [eps, 1-eps] before the logs.
template <typename T>
T bce_loss(const Tensor<T>& pred, const Tensor<T>& target) {
    if (!pred.same_shape(target)) throw InputError("bce_loss: shape mismatch");
    const T eps = static_cast<T>(kBceEps);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        T p = pred.data()[i];
        if (p < eps) p = eps;
        if (p > T(1) - eps) p = T(1) - eps;
        const T y = target.data()[i];
        acc += -static_cast<long double>(y) * std::log(static_cast<long double>(p)) -
               static_cast<long double>(T(1) - y) * std::log(static_cast<long double>(T(1) - p));
    }
    return static_cast<T>(acc / static_cast<long double>(pred.size()));
}

// Loss plus gradient w.r.t. the predictions.
template <typename T>
std::pair<T, Tensor<T>> bce_loss_with_grad(const Tensor<T>& pred, const Tensor<T>& target) {
    if (!pred.same_shape(target)) throw InputError("bce_loss: shape mismatch");
    const T eps = static_cast<T>(kBceEps);
    const T inv_m = T(1) / static_cast<T>(pred.size());
    Tensor<T> grad = Tensor<T>::zeros_like(pred);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        T p = pred.data()[i];
        if (p < eps) p = eps;
        if (p > T(1) - eps) p = T(1) - eps;
        const T y = target.data()[i];
        acc += -static_cast<long double>(y) * std::log(static_cast<long double>(p)) -
               static_cast<long double>(T(1) - y) * std::log(static_cast<long double>(T(1) - p));
        grad.data()[i] = (p - y) / (p * (T(1) - p)) * inv_m;
    }
    return {static_cast<T>(acc / static_cast<long double>(pred.size())), std::move(grad)};
}

}  // namespace awnet
