#pragma once

#include "awnet/model/config.hpp"
#include "awnet/nn/batchnorm.hpp"
#include "awnet/nn/conv.hpp"
#include "awnet/nn/ops.hpp"

namespace awnet {

// Residual unit: conv -> BN -> ReLU -> dropout -> conv -> BN, add input, ReLU.
// In the Shared variant both conv applications use the same kernel tensor, so
// the kernel holds one set of weights but receives gradient from both passes.
// The convolutions carry no bias (BatchNorm supplies the affine shift); the
// NoBatchNorm variant skips both norms and keeps the rest of the ordering.
template <typename T>
class ResBlock {
public:
    ResBlock() = default;
    ResBlock(int channels, int kernel, double dropout_rate, ResBlockVariant variant)
        : channels_(channels),
          dropout_(static_cast<T>(dropout_rate)),
          variant_(variant),
          conv_(channels, channels, kernel, 1, kernel / 2, /*bias=*/false) {
        if (variant_ == ResBlockVariant::Plain)
            conv2_ = Conv2d<T>(channels, channels, kernel, 1, kernel / 2, false);
        if (variant_ != ResBlockVariant::NoBatchNorm) {
            bn1_ = BatchNorm2d<T>(channels);
            bn2_ = BatchNorm2d<T>(channels);
        }
    }

    void init(Rng& rng) {
        conv_.init(rng);
        if (variant_ == ResBlockVariant::Plain) conv2_.init(rng);
    }

    Tensor<T> forward(const Tensor<T>& x, bool training, Rng* rng) {
        if (x.c() != channels_) throw ConfigError("resblock channel mismatch");
        cache_.x = x;
        Tensor<T> h = conv_.forward(x);
        if (has_bn()) h = bn1_.forward(h, training, cache_.c1);
        cache_.r1 = relu(h);
        Tensor<T> d = cache_.r1;
        if (training && dropout_ > T(0)) {
            if (!rng) throw ConfigError("training forward needs an rng for dropout");
            d = spatial_dropout(cache_.r1, dropout_, *rng, cache_.dm);
            cache_.dropped = true;
        } else {
            cache_.dropped = false;
        }
        cache_.d1 = d;
        Tensor<T> h2 = second_conv().forward(d);
        if (has_bn()) h2 = bn2_.forward(h2, training, cache_.c2);
        h2 += x;
        cache_.y = relu(h2);
        return cache_.y;
    }

    Tensor<T> backward(const Tensor<T>& gy) {
        Tensor<T> gs = relu_backward(gy, cache_.y);
        Tensor<T> gx = gs;  // skip path
        Tensor<T> gh2 = has_bn() ? bn2_.backward(gs, cache_.c2) : gs;
        Tensor<T> gd = second_conv().backward(gh2, cache_.d1);
        Tensor<T> gr1 = cache_.dropped ? spatial_dropout_backward(gd, cache_.dm) : gd;
        Tensor<T> gh1 = relu_backward(gr1, cache_.r1);
        if (has_bn()) gh1 = bn1_.backward(gh1, cache_.c1);
        gx += conv_.backward(gh1, cache_.x);
        return gx;
    }

    void collect(const std::string& prefix, ParamList<T>& params, StateList<T>& state) {
        conv_.collect(prefix + ".conv", params);
        if (variant_ == ResBlockVariant::Plain) conv2_.collect(prefix + ".conv2", params);
        if (has_bn()) {
            bn1_.collect(prefix + ".bn1", params, state);
            bn2_.collect(prefix + ".bn2", params, state);
        }
    }

    Conv2d<T>& conv() { return conv_; }
    BatchNorm2d<T>& bn1() { return bn1_; }
    BatchNorm2d<T>& bn2() { return bn2_; }

private:
    bool has_bn() const { return variant_ != ResBlockVariant::NoBatchNorm; }
    Conv2d<T>& second_conv() { return variant_ == ResBlockVariant::Plain ? conv2_ : conv_; }

    struct Cache {
        Tensor<T> x, r1, d1, y;
        BnCache<T> c1, c2;
        DropoutMask<T> dm;
        bool dropped = false;
    };

    int channels_ = 0;
    T dropout_ = T(0);
    ResBlockVariant variant_ = ResBlockVariant::Shared;
    Conv2d<T> conv_;
    Conv2d<T> conv2_;  // Plain variant only
    BatchNorm2d<T> bn1_, bn2_;
    Cache cache_;
};

}  // namespace awnet
