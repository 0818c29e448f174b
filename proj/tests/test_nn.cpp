#include "doctest.h"

#include "awnet/nn/batchnorm.hpp"
#include "awnet/nn/conv.hpp"
#include "awnet/nn/ops.hpp"
#include "testutil.hpp"

using namespace awnet;
using namespace awnet::testutil;

TEST_SUITE_BEGIN("nn");

TEST_CASE("conv2d matches the direct-loop reference") {
    Rng rng(7);
    for (const auto& [stride, pad, bias] : {std::tuple{1, 1, true}, {2, 1, true}, {1, 0, false}}) {
        Conv2d<double> conv(3, 5, 3, stride, pad, bias);
        conv.init(rng);
        Tensor<double> x(2, 3, 12, 12);
        fill_random(x, rng);
        const Tensor<double> got = conv.forward(x);
        const Tensor<double> want =
            reference_conv(x, conv.weight.value, bias ? conv.bias_p.value.data() : nullptr, stride, pad);
        CHECK(max_abs_diff(got, want) < 1e-12);
    }
}

TEST_CASE("conv2d 1x1 matches the reference") {
    Rng rng(11);
    Conv2d<double> conv(4, 1, 1, 1, 0, true);
    conv.init(rng);
    Tensor<double> x(2, 4, 6, 6);
    fill_random(x, rng);
    CHECK(max_abs_diff(conv.forward(x), reference_conv(x, conv.weight.value, conv.bias_p.value.data(), 1, 0)) <
          1e-12);
}

TEST_CASE("transposed conv is the adjoint of the strided conv") {
    // <conv(x), y> == <x, tconv(y)> when both share one weight tensor and the
    // output padding restores the original extent.
    Rng rng(3);
    const int in_c = 3, out_c = 4, H = 8;
    Conv2d<double> conv(in_c, out_c, 3, 2, 1, false);
    conv.init(rng);
    ConvTranspose2d<double> tconv(out_c, in_c, 3, 2, 1, 1, false);
    std::copy(conv.weight.value.data(), conv.weight.value.data() + conv.weight.value.size(),
              tconv.weight.value.data());

    Tensor<double> x(2, in_c, H, H), y(2, out_c, H / 2, H / 2);
    fill_random(x, rng);
    fill_random(y, rng);
    const Tensor<double> cx = conv.forward(x);
    const Tensor<double> ty = tconv.forward(y);
    REQUIRE(cx.same_shape(y));
    REQUIRE(ty.same_shape(x));
    long double lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < cx.size(); ++i) lhs += static_cast<long double>(cx.data()[i]) * y.data()[i];
    for (std::size_t i = 0; i < ty.size(); ++i) rhs += static_cast<long double>(ty.data()[i]) * x.data()[i];
    CHECK(std::abs(static_cast<double>(lhs - rhs)) < 1e-10);
}

TEST_CASE("conv backward matches finite differences") {
    Rng rng(5);
    Conv2d<double> conv(2, 3, 3, 1, 1, true);
    conv.init(rng);
    Tensor<double> x(1, 2, 5, 5);
    fill_random(x, rng);
    Tensor<double> gy(1, 3, 5, 5);
    fill_random(gy, rng);

    conv.weight.zero_grad();
    conv.bias_p.zero_grad();
    Tensor<double> gx = conv.backward(gy, x);

    auto loss = [&] {
        const Tensor<double> y = conv.forward(x);
        long double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += static_cast<long double>(y.data()[i]) * gy.data()[i];
        return static_cast<double>(s);
    };
    const double eps = 1e-6;
    for (std::size_t i : {std::size_t{0}, std::size_t{7}, std::size_t{33}}) {
        const double keep = conv.weight.value.data()[i];
        conv.weight.value.data()[i] = keep + eps;
        const double up = loss();
        conv.weight.value.data()[i] = keep - eps;
        const double dn = loss();
        conv.weight.value.data()[i] = keep;
        CHECK(conv.weight.grad.data()[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-6));
    }
    for (std::size_t i : {std::size_t{0}, std::size_t{12}}) {
        const double keep = x.data()[i];
        x.data()[i] = keep + eps;
        const double up = loss();
        x.data()[i] = keep - eps;
        const double dn = loss();
        x.data()[i] = keep;
        CHECK(gx.data()[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-6));
    }
}

TEST_CASE("tconv backward matches finite differences") {
    Rng rng(9);
    ConvTranspose2d<double> tconv(3, 2, 3, 2, 1, 1, true);
    tconv.init(rng);
    Tensor<double> x(1, 3, 4, 4);
    fill_random(x, rng);
    Tensor<double> gy(1, 2, 8, 8);
    fill_random(gy, rng);

    tconv.weight.zero_grad();
    tconv.bias_p.zero_grad();
    Tensor<double> gx = tconv.backward(gy, x);

    auto loss = [&] {
        const Tensor<double> y = tconv.forward(x);
        long double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += static_cast<long double>(y.data()[i]) * gy.data()[i];
        return static_cast<double>(s);
    };
    const double eps = 1e-6;
    for (std::size_t i : {std::size_t{1}, std::size_t{20}}) {
        const double keep = tconv.weight.value.data()[i];
        tconv.weight.value.data()[i] = keep + eps;
        const double up = loss();
        tconv.weight.value.data()[i] = keep - eps;
        const double dn = loss();
        tconv.weight.value.data()[i] = keep;
        CHECK(tconv.weight.grad.data()[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-6));
    }
    for (std::size_t i : {std::size_t{3}, std::size_t{17}}) {
        const double keep = x.data()[i];
        x.data()[i] = keep + eps;
        const double up = loss();
        x.data()[i] = keep - eps;
        const double dn = loss();
        x.data()[i] = keep;
        CHECK(gx.data()[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-6));
    }
}

TEST_CASE("batchnorm training backward matches finite differences") {
    Rng rng(13);
    BatchNorm2d<double> bn(3);
    Tensor<double> x(2, 3, 4, 4);
    fill_random(x, rng);
    Tensor<double> gy(2, 3, 4, 4);
    fill_random(gy, rng);
    // non-trivial affine parameters
    for (int c = 0; c < 3; ++c) {
        bn.gamma.value.data()[c] = 0.5 + 0.3 * c;
        bn.beta.value.data()[c] = -0.2 + 0.1 * c;
    }

    BnCache<double> cache;
    bn.gamma.zero_grad();
    bn.beta.zero_grad();
    bn.forward(x, true, cache);
    Tensor<double> gx = bn.backward(gy, cache);

    auto loss = [&] {
        BatchNorm2d<double> tmp = bn;  // keep running stats untouched in the probe
        BnCache<double> c2;
        const Tensor<double> y = tmp.forward(x, true, c2);
        long double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += static_cast<long double>(y.data()[i]) * gy.data()[i];
        return static_cast<double>(s);
    };
    const double eps = 1e-6;
    for (std::size_t i : {std::size_t{2}, std::size_t{30}, std::size_t{77}}) {
        const double keep = x.data()[i];
        x.data()[i] = keep + eps;
        const double up = loss();
        x.data()[i] = keep - eps;
        const double dn = loss();
        x.data()[i] = keep;
        CHECK(gx.data()[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-5));
    }
    for (int c = 0; c < 3; ++c) {
        const double keep = bn.gamma.value.data()[c];
        bn.gamma.value.data()[c] = keep + eps;
        const double up = loss();
        bn.gamma.value.data()[c] = keep - eps;
        const double dn = loss();
        bn.gamma.value.data()[c] = keep;
        CHECK(bn.gamma.grad.data()[c] == doctest::Approx((up - dn) / (2 * eps)).epsilon(1e-6));
    }
}

TEST_CASE("batchnorm eval uses running statistics and is per-sample") {
    BatchNorm2d<float> bn(1);
    Tensor<float> x(2, 1, 2, 2);
    x.fill(3.f);
    BnCache<float> cache;
    const Tensor<float> y = bn.forward(x, false, cache);
    // fresh stats: mean 0, var 1 -> y ~= x
    CHECK(y(0, 0, 0, 0) == doctest::Approx(3.f).epsilon(1e-4));
}

TEST_CASE("spatial dropout zeroes whole channels and rescales the rest") {
    Rng rng(21);
    Tensor<float> x(4, 8, 3, 3);
    x.fill(1.f);
    DropoutMask<float> mask;
    const Tensor<float> y = spatial_dropout(x, 0.5f, rng, mask);
    int zero_channels = 0, kept = 0;
    for (int n = 0; n < 4; ++n)
        for (int c = 0; c < 8; ++c) {
            const float v = y(n, c, 0, 0);
            for (int i = 0; i < 9; ++i) CHECK(y.sample(n)[c * 9 + i] == v);  // whole-channel decision
            if (v == 0.f)
                ++zero_channels;
            else {
                CHECK(v == doctest::Approx(2.f));
                ++kept;
            }
        }
    CHECK(zero_channels + kept == 32);
    CHECK(zero_channels > 0);
    CHECK(kept > 0);
}

TEST_SUITE_END();
