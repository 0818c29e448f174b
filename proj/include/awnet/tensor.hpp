#pragma once

#include <cstdint>
#include <vector>

#include "awnet/errors.hpp"

namespace awnet {

// Dense NCHW tensor. Plain value type: copy/move do what you expect.
template <typename T>
class Tensor {
public:
    Tensor() = default;
    Tensor(int n, int c, int h, int w) : n_(n), c_(c), h_(h), w_(w), data_(static_cast<std::size_t>(n) * c * h * w, T(0)) {
        if (n < 0 || c < 0 || h < 0 || w < 0) throw ConfigError("negative tensor dimension");
    }

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.n_, other.c_, other.h_, other.w_); }

    int n() const { return n_; }
    int c() const { return c_; }
    int h() const { return h_; }
    int w() const { return w_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    std::size_t plane() const { return static_cast<std::size_t>(h_) * w_; }
    std::size_t sample_size() const { return static_cast<std::size_t>(c_) * h_ * w_; }

    bool same_shape(const Tensor& o) const { return n_ == o.n_ && c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator()(int n, int c, int y, int x) { return data_[offset(n, c, y, x)]; }
    const T& operator()(int n, int c, int y, int x) const { return data_[offset(n, c, y, x)]; }

    T* sample(int n) { return data_.data() + static_cast<std::size_t>(n) * sample_size(); }
    const T* sample(int n) const { return data_.data() + static_cast<std::size_t>(n) * sample_size(); }

    void zero() { std::fill(data_.begin(), data_.end(), T(0)); }
    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    Tensor& operator+=(const Tensor& o) {
        if (!same_shape(o)) throw ConfigError("tensor shape mismatch in +=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(n_, c_, h_, w_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
        return out;
    }

private:
    std::size_t offset(int n, int c, int y, int x) const {
        return ((static_cast<std::size_t>(n) * c_ + c) * h_ + y) * w_ + x;
    }

    int n_ = 0, c_ = 0, h_ = 0, w_ = 0;
    std::vector<T> data_;
};

template <typename T>
Tensor<T> operator+(Tensor<T> a, const Tensor<T>& b) {
    a += b;
    return a;
}

}  // namespace awnet
