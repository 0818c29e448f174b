#pragma once

#include <cmath>
#include <vector>

#include "awnet/errors.hpp"
#include "awnet/nn/gemm.hpp"
#include "awnet/nn/param.hpp"
#include "awnet/rng.hpp"
#include "awnet/tensor.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace awnet {

// 2-D convolution, zero padding. Weight layout [out_c][in_c][k][k]; viewed as a
// row-major (out_c) x (in_c*k*k) matrix it multiplies im2col columns directly.
// Layers are stateless with respect to activations: backward() receives the
// input that was used in the matching forward call, which makes weight sharing
// (one kernel applied several times) a plain matter of calling backward twice.
template <typename T>
class Conv2d {
public:
    Conv2d() = default;
    Conv2d(int in_c, int out_c, int k, int stride, int pad, bool bias)
        : in_c_(in_c), out_c_(out_c), k_(k), stride_(stride), pad_(pad), has_bias_(bias) {
        weight.init_shape(out_c, in_c, k, k);
        if (has_bias_) bias_p.init_shape(1, out_c, 1, 1);
    }

    void init(Rng& rng) {
        const double fan_in = static_cast<double>(in_c_) * k_ * k_;
        const double std = std::sqrt(2.0 / fan_in);
        for (std::size_t i = 0; i < weight.value.size(); ++i)
            weight.value.data()[i] = static_cast<T>(rng.normal() * std);
        if (has_bias_) bias_p.value.zero();
    }

    int out_dim(int in) const { return (in + 2 * pad_ - k_) / stride_ + 1; }

    Tensor<T> forward(const Tensor<T>& x) const {
        if (x.c() != in_c_) throw ConfigError("conv input channels mismatch");
        const int oh = out_dim(x.h()), ow = out_dim(x.w());
        Tensor<T> y(x.n(), out_c_, oh, ow);
        const int m = oh * ow;
        const int kk = in_c_ * k_ * k_;
#pragma omp parallel for schedule(static)
        for (int n = 0; n < x.n(); ++n) {
            std::vector<T> cols(static_cast<std::size_t>(kk) * m);
            im2col(x.sample(n), in_c_, x.h(), x.w(), k_, stride_, pad_, oh, ow, cols.data());
            gemm(weight.value.data(), cols.data(), y.sample(n), out_c_, kk, m);
            if (has_bias_) {
                for (int oc = 0; oc < out_c_; ++oc) {
                    T* row = y.sample(n) + static_cast<std::size_t>(oc) * m;
                    const T b = bias_p.value.data()[oc];
                    for (int i = 0; i < m; ++i) row[i] += b;
                }
            }
        }
        return y;
    }

    // Accumulates weight/bias gradients, returns gradient w.r.t. x.
    Tensor<T> backward(const Tensor<T>& gy, const Tensor<T>& x) {
        const int oh = gy.h(), ow = gy.w();
        const int m = oh * ow;
        const int kk = in_c_ * k_ * k_;
        Tensor<T> gx(x.n(), in_c_, x.h(), x.w());
        std::vector<Tensor<T>> gw_local(x.n());
#pragma omp parallel for schedule(static)
        for (int n = 0; n < x.n(); ++n) {
            std::vector<T> cols(static_cast<std::size_t>(kk) * m);
            im2col(x.sample(n), in_c_, x.h(), x.w(), k_, stride_, pad_, oh, ow, cols.data());
            gw_local[n] = Tensor<T>(out_c_, in_c_, k_, k_);
            gemm_bt_acc(gy.sample(n), cols.data(), gw_local[n].data(), out_c_, m, kk);
            // gx_n = W^T * gy_n, scattered back
            std::vector<T> gcols(static_cast<std::size_t>(kk) * m);
            gemm_at(weight.value.data(), gy.sample(n), gcols.data(), kk, out_c_, m);
            col2im_add(gcols.data(), in_c_, x.h(), x.w(), k_, stride_, pad_, oh, ow, gx.sample(n));
        }
        // Fixed-order reduction keeps gradients independent of thread count.
        for (int n = 0; n < x.n(); ++n) weight.grad += gw_local[n];
        if (has_bias_) {
            for (int n = 0; n < x.n(); ++n)
                for (int oc = 0; oc < out_c_; ++oc) {
                    const T* row = gy.sample(n) + static_cast<std::size_t>(oc) * m;
                    T s = 0;
                    for (int i = 0; i < m; ++i) s += row[i];
                    bias_p.grad.data()[oc] += s;
                }
        }
        return gx;
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".weight", &weight});
        if (has_bias_) out.push_back({prefix + ".bias", &bias_p});
    }

    Param<T> weight;
    Param<T> bias_p;

    int in_c_ = 0, out_c_ = 0, k_ = 0, stride_ = 1, pad_ = 0;
    bool has_bias_ = true;
};

// Transposed convolution (fractionally strided). Weight layout
// [in_c][out_c][k][k]. Output size (in-1)*stride - 2*pad + k + output_pad.
template <typename T>
class ConvTranspose2d {
public:
    ConvTranspose2d() = default;
    ConvTranspose2d(int in_c, int out_c, int k, int stride, int pad, int output_pad, bool bias)
        : in_c_(in_c), out_c_(out_c), k_(k), stride_(stride), pad_(pad), opad_(output_pad), has_bias_(bias) {
        weight.init_shape(in_c, out_c, k, k);
        if (has_bias_) bias_p.init_shape(1, out_c, 1, 1);
    }

    void init(Rng& rng) {
        const double fan_in = static_cast<double>(in_c_) * k_ * k_;
        const double std = std::sqrt(2.0 / fan_in);
        for (std::size_t i = 0; i < weight.value.size(); ++i)
            weight.value.data()[i] = static_cast<T>(rng.normal() * std);
        if (has_bias_) bias_p.value.zero();
    }

    int out_dim(int in) const { return (in - 1) * stride_ - 2 * pad_ + k_ + opad_; }

    Tensor<T> forward(const Tensor<T>& x) const {
        if (x.c() != in_c_) throw ConfigError("tconv input channels mismatch");
        const int oh = out_dim(x.h()), ow = out_dim(x.w());
        Tensor<T> y(x.n(), out_c_, oh, ow);
        const int m = x.h() * x.w();
        const int kk = out_c_ * k_ * k_;
#pragma omp parallel for schedule(static)
        for (int n = 0; n < x.n(); ++n) {
            std::vector<T> cols(static_cast<std::size_t>(kk) * m);
            // cols = W^T (kk x in_c) * x_n (in_c x m)
            gemm_at(weight.value.data(), x.sample(n), cols.data(), kk, in_c_, m);
            col2im_add(cols.data(), out_c_, oh, ow, k_, stride_, pad_, x.h(), x.w(), y.sample(n));
            if (has_bias_) {
                for (int oc = 0; oc < out_c_; ++oc) {
                    T* row = y.sample(n) + static_cast<std::size_t>(oc) * oh * ow;
                    const T b = bias_p.value.data()[oc];
                    for (int i = 0; i < oh * ow; ++i) row[i] += b;
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, const Tensor<T>& x) {
        const int oh = gy.h(), ow = gy.w();
        const int m = x.h() * x.w();
        const int kk = out_c_ * k_ * k_;
        Tensor<T> gx(x.n(), in_c_, x.h(), x.w());
        std::vector<Tensor<T>> gw_local(x.n());
#pragma omp parallel for schedule(static)
        for (int n = 0; n < x.n(); ++n) {
            std::vector<T> cols(static_cast<std::size_t>(kk) * m);
            im2col(gy.sample(n), out_c_, oh, ow, k_, stride_, pad_, x.h(), x.w(), cols.data());
            // gx_n = W (in_c x kk) * cols (kk x m)
            gemm(weight.value.data(), cols.data(), gx.sample(n), in_c_, kk, m);
            gw_local[n] = Tensor<T>(in_c_, out_c_, k_, k_);
            gemm_bt_acc(x.sample(n), cols.data(), gw_local[n].data(), in_c_, m, kk);
        }
        for (int n = 0; n < x.n(); ++n) weight.grad += gw_local[n];
        if (has_bias_) {
            for (int n = 0; n < x.n(); ++n)
                for (int oc = 0; oc < out_c_; ++oc) {
                    const T* row = gy.sample(n) + static_cast<std::size_t>(oc) * oh * ow;
                    T s = 0;
                    for (int i = 0; i < oh * ow; ++i) s += row[i];
                    bias_p.grad.data()[oc] += s;
                }
        }
        return gx;
    }

    void collect(const std::string& prefix, ParamList<T>& out) {
        out.push_back({prefix + ".weight", &weight});
        if (has_bias_) out.push_back({prefix + ".bias", &bias_p});
    }

    Param<T> weight;
    Param<T> bias_p;

    int in_c_ = 0, out_c_ = 0, k_ = 0, stride_ = 1, pad_ = 0, opad_ = 0;
    bool has_bias_ = true;
};

}  // namespace awnet
