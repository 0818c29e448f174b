#pragma once

#include <Eigen/Core>

namespace awnet {

template <typename T>
using MatMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// C = A(m x k) * B(k x n), all row-major dense buffers.
template <typename T>
void gemm(const T* a, const T* b, T* c, int m, int k, int n) {
    ConstMatMap<T> ma(a, m, k);
    ConstMatMap<T> mb(b, k, n);
    MatMap<T> mc(c, m, n);
    mc.noalias() = ma * mb;
}

// C += A(m x k) * B(k x n)
template <typename T>
void gemm_acc(const T* a, const T* b, T* c, int m, int k, int n) {
    ConstMatMap<T> ma(a, m, k);
    ConstMatMap<T> mb(b, k, n);
    MatMap<T> mc(c, m, n);
    mc.noalias() += ma * mb;
}

// C = A^T(m x k) * B(... ) where A is stored (k x m) row-major.
template <typename T>
void gemm_at(const T* a, const T* b, T* c, int m, int k, int n) {
    ConstMatMap<T> ma(a, k, m);
    ConstMatMap<T> mb(b, k, n);
    MatMap<T> mc(c, m, n);
    mc.noalias() = ma.transpose() * mb;
}

// C += A(m x k) * B^T where B is stored (n x k) row-major.
template <typename T>
void gemm_bt_acc(const T* a, const T* b, T* c, int m, int k, int n) {
    ConstMatMap<T> ma(a, m, k);
    ConstMatMap<T> mb(b, n, k);
    MatMap<T> mc(c, m, n);
    mc.noalias() += ma * mb.transpose();
}

// Unpacks one sample (C x H x W) into a (C*k*k) x (gridH*gridW) matrix for the
// sampling geometry src[y = gy*stride - pad + kh, x = gx*stride - pad + kw].
// Out-of-bounds taps read as zero.
template <typename T>
void im2col(const T* src, int channels, int height, int width, int k, int stride, int pad,
            int grid_h, int grid_w, T* cols) {
    const int m = grid_h * grid_w;
    for (int c = 0; c < channels; ++c) {
        for (int kh = 0; kh < k; ++kh) {
            for (int kw = 0; kw < k; ++kw) {
                T* row = cols + (static_cast<std::size_t>(c) * k * k + kh * k + kw) * m;
                for (int gy = 0; gy < grid_h; ++gy) {
                    const int sy = gy * stride - pad + kh;
                    if (sy < 0 || sy >= height) {
                        for (int gx = 0; gx < grid_w; ++gx) row[gy * grid_w + gx] = T(0);
                        continue;
                    }
                    const T* src_row = src + (static_cast<std::size_t>(c) * height + sy) * width;
                    for (int gx = 0; gx < grid_w; ++gx) {
                        const int sx = gx * stride - pad + kw;
                        row[gy * grid_w + gx] = (sx < 0 || sx >= width) ? T(0) : src_row[sx];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-adds the column matrix back into (C x H x W).
// Caller clears dst beforehand when overwrite semantics are wanted.
template <typename T>
void col2im_add(const T* cols, int channels, int height, int width, int k, int stride, int pad,
                int grid_h, int grid_w, T* dst) {
    const int m = grid_h * grid_w;
    for (int c = 0; c < channels; ++c) {
        for (int kh = 0; kh < k; ++kh) {
            for (int kw = 0; kw < k; ++kw) {
                const T* row = cols + (static_cast<std::size_t>(c) * k * k + kh * k + kw) * m;
                for (int gy = 0; gy < grid_h; ++gy) {
                    const int sy = gy * stride - pad + kh;
                    if (sy < 0 || sy >= height) continue;
                    T* dst_row = dst + (static_cast<std::size_t>(c) * height + sy) * width;
                    for (int gx = 0; gx < grid_w; ++gx) {
                        const int sx = gx * stride - pad + kw;
                        if (sx >= 0 && sx < width) dst_row[sx] += row[gy * grid_w + gx];
                    }
                }
            }
        }
    }
}

}  // namespace awnet
