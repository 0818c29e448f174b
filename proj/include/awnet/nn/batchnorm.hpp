#pragma once

#include <cmath>
#include <vector>

#include "awnet/errors.hpp"
#include "awnet/nn/param.hpp"
#include "awnet/tensor.hpp"

namespace awnet {

// Per-application cache; a block that reuses one BatchNorm twice would own two.
template <typename T>
struct BnCache {
    Tensor<T> xhat;
    std::vector<T> inv_std;  // per channel
    bool training = false;
};

template <typename T>
class BatchNorm2d {
public:
    BatchNorm2d() = default;
    explicit BatchNorm2d(int channels, T eps = T(1e-5), T momentum = T(0.1))
        : c_(channels), eps_(eps), momentum_(momentum) {
        gamma.init_shape(1, channels, 1, 1);
        beta.init_shape(1, channels, 1, 1);
        gamma.value.fill(T(1));
        running_mean = Tensor<T>(1, channels, 1, 1);
        running_var = Tensor<T>(1, channels, 1, 1);
        running_var.fill(T(1));
    }

    Tensor<T> forward(const Tensor<T>& x, bool training, BnCache<T>& cache) {
        if (x.c() != c_) throw ConfigError("batchnorm channel mismatch");
        const std::size_t plane = x.plane();
        const std::size_t m = static_cast<std::size_t>(x.n()) * plane;
        Tensor<T> y = Tensor<T>::zeros_like(x);
        cache.xhat = Tensor<T>::zeros_like(x);
        cache.inv_std.assign(c_, T(0));
        cache.training = training;
#pragma omp parallel for schedule(static)
        for (int c = 0; c < c_; ++c) {
            T mean, var;
            if (training) {
                T sum = 0;
                for (int n = 0; n < x.n(); ++n) {
                    const T* p = x.sample(n) + c * plane;
                    for (std::size_t i = 0; i < plane; ++i) sum += p[i];
                }
                mean = sum / static_cast<T>(m);
                T sq = 0;
                for (int n = 0; n < x.n(); ++n) {
                    const T* p = x.sample(n) + c * plane;
                    for (std::size_t i = 0; i < plane; ++i) {
                        const T d = p[i] - mean;
                        sq += d * d;
                    }
                }
                var = sq / static_cast<T>(m);  // biased, used for normalisation
                const T unbiased = m > 1 ? sq / static_cast<T>(m - 1) : var;
                running_mean.data()[c] = (T(1) - momentum_) * running_mean.data()[c] + momentum_ * mean;
                running_var.data()[c] = (T(1) - momentum_) * running_var.data()[c] + momentum_ * unbiased;
            } else {
                mean = running_mean.data()[c];
                var = running_var.data()[c];
            }
            const T inv = T(1) / std::sqrt(var + eps_);
            cache.inv_std[c] = inv;
            const T g = gamma.value.data()[c], b = beta.value.data()[c];
            for (int n = 0; n < x.n(); ++n) {
                const T* p = x.sample(n) + c * plane;
                T* xh = cache.xhat.sample(n) + c * plane;
                T* yo = y.sample(n) + c * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    xh[i] = (p[i] - mean) * inv;
                    yo[i] = g * xh[i] + b;
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, const BnCache<T>& cache) {
        const std::size_t plane = gy.plane();
        const std::size_t m = static_cast<std::size_t>(gy.n()) * plane;
        Tensor<T> gx = Tensor<T>::zeros_like(gy);
#pragma omp parallel for schedule(static)
        for (int c = 0; c < c_; ++c) {
            const T g = gamma.value.data()[c];
            const T inv = cache.inv_std[c];
            T sum_gy = 0, sum_gy_xhat = 0;
            for (int n = 0; n < gy.n(); ++n) {
                const T* gp = gy.sample(n) + c * plane;
                const T* xh = cache.xhat.sample(n) + c * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    sum_gy += gp[i];
                    sum_gy_xhat += gp[i] * xh[i];
                }
            }
            gamma.grad.data()[c] += sum_gy_xhat;
            beta.grad.data()[c] += sum_gy;
            if (cache.training) {
                const T inv_m = T(1) / static_cast<T>(m);
                for (int n = 0; n < gy.n(); ++n) {
                    const T* gp = gy.sample(n) + c * plane;
                    const T* xh = cache.xhat.sample(n) + c * plane;
                    T* gxp = gx.sample(n) + c * plane;
                    for (std::size_t i = 0; i < plane; ++i)
                        gxp[i] = g * inv * (gp[i] - inv_m * sum_gy - xh[i] * inv_m * sum_gy_xhat);
                }
            } else {
                for (int n = 0; n < gy.n(); ++n) {
                    const T* gp = gy.sample(n) + c * plane;
                    T* gxp = gx.sample(n) + c * plane;
                    for (std::size_t i = 0; i < plane; ++i) gxp[i] = g * inv * gp[i];
                }
            }
        }
        return gx;
    }

    void collect(const std::string& prefix, ParamList<T>& params, StateList<T>& state) {
        params.push_back({prefix + ".gamma", &gamma});
        params.push_back({prefix + ".beta", &beta});
        state.push_back({prefix + ".running_mean", &running_mean});
        state.push_back({prefix + ".running_var", &running_var});
    }

    Param<T> gamma, beta;
    Tensor<T> running_mean, running_var;

private:
    int c_ = 0;
    T eps_ = T(1e-5);
    T momentum_ = T(0.1);
};

}  // namespace awnet
