#pragma once

#include <string>
#include <vector>

#include "awnet/tensor.hpp"

namespace awnet {

// One learnable tensor plus its gradient accumulator.
template <typename T>
struct Param {
    Tensor<T> value;
    Tensor<T> grad;

    void init_shape(int n, int c, int h, int w) {
        value = Tensor<T>(n, c, h, w);
        grad = Tensor<T>(n, c, h, w);
    }
    std::size_t size() const { return value.size(); }
    void zero_grad() { grad.zero(); }
};

// Named view used when flattening a module tree for the optimizer,
// checkpointing and parameter counting. Names are stable across runs.
template <typename T>
struct NamedParam {
    std::string name;
    Param<T>* param;
};

// Non-learnable state that still has to travel with a checkpoint
// (batch-norm running statistics).
template <typename T>
struct NamedState {
    std::string name;
    Tensor<T>* tensor;
};

template <typename T>
using ParamList = std::vector<NamedParam<T>>;
template <typename T>
using StateList = std::vector<NamedState<T>>;

}  // namespace awnet
