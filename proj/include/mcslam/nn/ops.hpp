#pragma once

#include <cstdint>
#include <vector>

#include "mcslam/nn/tensor.hpp"

namespace mcslam::nn {

// slope 0 gives plain ReLU
Tensor leaky_relu(const Tensor& x, double slope);
Tensor leaky_relu_backward(const Tensor& grad, const Tensor& x, double slope);

Tensor sigmoid(const Tensor& x);
// backward takes the forward output y, not the input
Tensor sigmoid_backward(const Tensor& grad, const Tensor& y);

struct DropoutResult {
    Tensor y;
    std::vector<std::uint8_t> keep;
};

// Inverted dropout: zeroes units with probability rate, scales survivors by
// 1/(1-rate). train=false returns the input unchanged with an all-keep mask.
DropoutResult dropout(const Tensor& x, double rate, Rng& rng, bool train);
Tensor dropout_backward(const Tensor& grad, const std::vector<std::uint8_t>& keep, double rate);

}  // namespace mcslam::nn
