#pragma once

#include <vector>

#include "mcslam/nn/tensor.hpp"

namespace mcslam::nn {

// Weights of one (transposed) convolution layer. For conv2d the kernel is
// (out_ch, in_ch, kh, kw); for tconv2d it is (in_ch, out_ch, kh, kw). bias
// has one entry per output channel. sn_u is the persistent power-iteration
// vector, empty until spectral normalization first touches the layer.
struct ConvParams {
    Tensor kernel;
    std::vector<double> bias;
    std::vector<double> sn_u;
};

struct ConvGrads {
    Tensor input;
    Tensor kernel;
    std::vector<double> bias;
};

// Cross-correlation with zero padding; output H = (H + 2*pad - kh)/stride + 1.
Tensor conv2d_forward(const Tensor& x, const ConvParams& p, int stride, int pad);
ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& x, const ConvParams& p,
                          int stride, int pad);

// Adjoint spatial arithmetic; output H = (H - 1)*stride - 2*pad + kh.
Tensor tconv2d_forward(const Tensor& x, const ConvParams& p, int stride, int pad);
ConvGrads tconv2d_backward(const Tensor& grad_out, const Tensor& x, const ConvParams& p,
                           int stride, int pad);

}  // namespace mcslam::nn
