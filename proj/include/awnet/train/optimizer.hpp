#pragma once

#include <cmath>
#include <vector>

#include "awnet/nn/param.hpp"

namespace awnet {

// Adam with the usual defaults: beta1 0.9, beta2 0.999, eps 1e-8,
// bias-corrected first and second moments.
template <typename T>
class Adam {
public:
    explicit Adam(ParamList<T>& params, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : params_(&params), beta1_(static_cast<T>(beta1)), beta2_(static_cast<T>(beta2)), eps_(static_cast<T>(eps)) {
        m_.resize(params.size());
        v_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = Tensor<T>::zeros_like(params[i].param->value);
            v_[i] = Tensor<T>::zeros_like(params[i].param->value);
        }
    }

    void step(double lr) {
        ++t_;
        const T bc1 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta1_), t_));
        const T bc2 = T(1) - static_cast<T>(std::pow(static_cast<double>(beta2_), t_));
        const T alpha = static_cast<T>(lr);
        for (std::size_t i = 0; i < params_->size(); ++i) {
            Param<T>& p = *(*params_)[i].param;
            T* w = p.value.data();
            const T* g = p.grad.data();
            T* m = m_[i].data();
            T* v = v_[i].data();
            for (std::size_t j = 0; j < p.value.size(); ++j) {
                m[j] = beta1_ * m[j] + (T(1) - beta1_) * g[j];
                v[j] = beta2_ * v[j] + (T(1) - beta2_) * g[j] * g[j];
                const T mhat = m[j] / bc1;
                const T vhat = v[j] / bc2;
                w[j] -= alpha * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

    long step_count() const { return t_; }

private:
    ParamList<T>* params_;
    std::vector<Tensor<T>> m_, v_;
    T beta1_, beta2_, eps_;
    long t_ = 0;
};

}  // namespace awnet
