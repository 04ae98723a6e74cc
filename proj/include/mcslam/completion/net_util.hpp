#pragma once

#include <string>
#include <vector>

#include "mcslam/nn/adam.hpp"
#include "mcslam/nn/checkpoint.hpp"
#include "mcslam/nn/conv.hpp"
#include "mcslam/nn/spectral_norm.hpp"

namespace mcslam::completion {

// One (transposed) convolution layer plus its optimizer state.
struct Layer {
    nn::ConvParams p;
    bool transpose = false;
    int stride = 2;
    int pad = 1;
    std::string name;
    nn::AdamState adam_kernel, adam_bias;
};

struct LayerCache {
    nn::Tensor in;
    nn::SpectralNormResult sn;   // the normalized weight actually applied
    bool used_sn = false;
};

struct LayerGrads {
    nn::Tensor kernel;
    std::vector<double> bias;
};

// kernel is (a, b, kh, kw): conv reads (out=a, in=b), tconv reads (in=a, out=b).
void init_layer(Layer& layer, const std::string& name, int a, int b, int kh, int kw,
                bool transpose, int stride, int pad, Rng& rng, bool spectral_norm);

// power_iters applies only when use_sn; 0 reuses the stored direction.
nn::Tensor layer_forward(Layer& layer, const nn::Tensor& x, bool use_sn, int power_iters,
                         LayerCache* cache);

// Returns the gradient wrt the layer input; fills grads (raw-weight space,
// spectral normalization unrolled) when non-null.
nn::Tensor layer_backward(Layer& layer, const nn::Tensor& grad_out, const LayerCache& cache,
                          LayerGrads* grads);

void layer_adam(Layer& layer, const LayerGrads& grads, const nn::AdamConfig& cfg);

void layer_param_refs(Layer& layer, bool spectral_norm, std::vector<nn::ParamRef>& out);

nn::Tensor concat_channels(const nn::Tensor& a, const nn::Tensor& b);
void split_channels(const nn::Tensor& x, int c_first, nn::Tensor& first, nn::Tensor& second);
nn::Tensor stack_batch(const nn::Tensor& a, const nn::Tensor& b);
nn::Tensor take_batch_half(const nn::Tensor& x, bool second_half);

}  // namespace mcslam::completion
