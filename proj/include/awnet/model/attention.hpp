#pragma once

#include <utility>

#include "awnet/model/config.hpp"
#include "awnet/nn/conv.hpp"
#include "awnet/nn/ops.hpp"

namespace awnet {

// Attention gate over an (encoder feature g, decoder feature x) pair at one
// level. The single-channel map p = sigmoid(psi(relu(W_enc g + W_dec x))) is
// broadcast across channels; every element of p lies strictly in (0,1).
//   Type2: output = g .* p + x
//   Type1: output = p .* x
template <typename T>
class AttentionGate {
public:
    AttentionGate() = default;
    AttentionGate(int channels, AttentionType type)
        : type_(type),
          w_enc_(channels, channels, 1, 1, 0, /*bias=*/true),
          w_dec_(channels, channels, 1, 1, 0, true),
          psi_(channels, 1, 1, 1, 0, true) {}

    void init(Rng& rng) {
        w_enc_.init(rng);
        w_dec_.init(rng);
        psi_.init(rng);
    }

    Tensor<T> forward(const Tensor<T>& g, const Tensor<T>& x) {
        if (!g.same_shape(x)) throw ConfigError("attention gate: encoder/decoder feature shapes differ");
        cache_.g = g;
        cache_.x = x;
        Tensor<T> s = w_enc_.forward(g);
        s += w_dec_.forward(x);
        cache_.r = relu(s);
        cache_.p = sigmoid(psi_.forward(cache_.r));
        if (type_ == AttentionType::Type1) return mul_broadcast_c(x, cache_.p);
        Tensor<T> y = mul_broadcast_c(g, cache_.p);
        y += x;
        return y;
    }

    // Returns (grad_g, grad_x).
    std::pair<Tensor<T>, Tensor<T>> backward(const Tensor<T>& gy) {
        Tensor<T> gg, gx, gp;
        if (type_ == AttentionType::Type1) {
            gx = mul_broadcast_c(gy, cache_.p);
            gp = mul_broadcast_c_backward_b(gy, cache_.x);
            gg = Tensor<T>::zeros_like(cache_.g);
        } else {
            gg = mul_broadcast_c(gy, cache_.p);
            gp = mul_broadcast_c_backward_b(gy, cache_.g);
            gx = gy;
        }
        Tensor<T> gq = sigmoid_backward(gp, cache_.p);
        Tensor<T> gr = psi_.backward(gq, cache_.r);
        Tensor<T> gs = relu_backward(gr, cache_.r);
        gg += w_enc_.backward(gs, cache_.g);
        gx += w_dec_.backward(gs, cache_.x);
        return {std::move(gg), std::move(gx)};
    }

    const Tensor<T>& attention_map() const { return cache_.p; }

    void collect(const std::string& prefix, ParamList<T>& params) {
        w_enc_.collect(prefix + ".w_enc", params);
        w_dec_.collect(prefix + ".w_dec", params);
        psi_.collect(prefix + ".psi", params);
    }

    Conv2d<T>& w_enc() { return w_enc_; }
    Conv2d<T>& w_dec() { return w_dec_; }
    Conv2d<T>& psi() { return psi_; }

private:
    struct Cache {
        Tensor<T> g, x, r, p;
    };

    AttentionType type_ = AttentionType::Type2;
    Conv2d<T> w_enc_, w_dec_, psi_;
    Cache cache_;
};

}  // namespace awnet
