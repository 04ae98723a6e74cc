#include "mcslam/completion/net_util.hpp"

#include <stdexcept>

namespace mcslam::completion {

void init_layer(Layer& layer, const std::string& name, int a, int b, int kh, int kw,
                bool transpose, int stride, int pad, Rng& rng, bool spectral_norm) {
    layer.name = name;
    layer.transpose = transpose;
    layer.stride = stride;
    layer.pad = pad;
    layer.p.kernel = nn::randn(a, b, kh, kw, rng, 0.02);
    layer.p.bias.assign(std::size_t(transpose ? b : a), 0.0);
    layer.p.sn_u.clear();
    layer.adam_kernel = {};
    layer.adam_bias = {};
    if (spectral_norm) nn::spectral_normalize(layer.p, 0);   /* materialize the direction */
}

nn::Tensor layer_forward(Layer& layer, const nn::Tensor& x, bool use_sn, int power_iters,
                         LayerCache* cache) {
    nn::ConvParams applied;
    nn::SpectralNormResult sn;
    if (use_sn) {
        sn = nn::spectral_normalize(layer.p, power_iters);
        applied.kernel = sn.kernel;
    } else {
        applied.kernel = layer.p.kernel;
    }
    applied.bias = layer.p.bias;
    nn::Tensor y = layer.transpose ? nn::tconv2d_forward(x, applied, layer.stride, layer.pad)
                                   : nn::conv2d_forward(x, applied, layer.stride, layer.pad);
    if (cache) {
        cache->in = x;
        cache->used_sn = use_sn;
        if (use_sn) cache->sn = std::move(sn);
    }
    return y;
}

nn::Tensor layer_backward(Layer& layer, const nn::Tensor& grad_out, const LayerCache& cache,
                          LayerGrads* grads) {
    nn::ConvParams applied;
    applied.kernel = cache.used_sn ? cache.sn.kernel : layer.p.kernel;
    applied.bias = layer.p.bias;
    nn::ConvGrads g = layer.transpose
                          ? nn::tconv2d_backward(grad_out, cache.in, applied, layer.stride,
                                                 layer.pad)
                          : nn::conv2d_backward(grad_out, cache.in, applied, layer.stride,
                                                layer.pad);
    if (grads) {
        grads->kernel =
            cache.used_sn ? nn::spectral_norm_backward(g.kernel, cache.sn) : std::move(g.kernel);
        grads->bias = std::move(g.bias);
    }
    return std::move(g.input);
}

void layer_adam(Layer& layer, const LayerGrads& grads, const nn::AdamConfig& cfg) {
    nn::adam_step(layer.p.kernel.data, grads.kernel.data, layer.adam_kernel, cfg);
    nn::adam_step(layer.p.bias, grads.bias, layer.adam_bias, cfg);
}

void layer_param_refs(Layer& layer, bool spectral_norm, std::vector<nn::ParamRef>& out) {
    const nn::Tensor& k = layer.p.kernel;
    out.push_back({layer.name + ".kernel",
                   &layer.p.kernel.data,
                   {std::uint32_t(k.n), std::uint32_t(k.c), std::uint32_t(k.h),
                    std::uint32_t(k.w)}});
    out.push_back({layer.name + ".bias", &layer.p.bias, {std::uint32_t(layer.p.bias.size())}});
    if (spectral_norm)
        out.push_back({layer.name + ".sn_u", &layer.p.sn_u, {std::uint32_t(layer.p.sn_u.size())}});
}

nn::Tensor concat_channels(const nn::Tensor& a, const nn::Tensor& b) {
    if (a.n != b.n || a.h != b.h || a.w != b.w)
        throw std::invalid_argument("channel concat shape mismatch");
    nn::Tensor y(a.n, a.c + b.c, a.h, a.w);
    const std::size_t plane = std::size_t(a.h) * a.w;
    for (int n = 0; n < a.n; ++n) {
        std::copy(a.data.begin() + long(a.index(n, 0, 0, 0)),
                  a.data.begin() + long(a.index(n, 0, 0, 0) + std::size_t(a.c) * plane),
                  y.data.begin() + long(y.index(n, 0, 0, 0)));
        std::copy(b.data.begin() + long(b.index(n, 0, 0, 0)),
                  b.data.begin() + long(b.index(n, 0, 0, 0) + std::size_t(b.c) * plane),
                  y.data.begin() + long(y.index(n, a.c, 0, 0)));
    }
    return y;
}

void split_channels(const nn::Tensor& x, int c_first, nn::Tensor& first, nn::Tensor& second) {
    if (c_first < 0 || c_first > x.c) throw std::invalid_argument("channel split out of range");
    first = nn::Tensor(x.n, c_first, x.h, x.w);
    second = nn::Tensor(x.n, x.c - c_first, x.h, x.w);
    const std::size_t plane = std::size_t(x.h) * x.w;
    for (int n = 0; n < x.n; ++n) {
        std::copy(x.data.begin() + long(x.index(n, 0, 0, 0)),
                  x.data.begin() + long(x.index(n, 0, 0, 0) + std::size_t(c_first) * plane),
                  first.data.begin() + long(first.index(n, 0, 0, 0)));
        std::copy(x.data.begin() + long(x.index(n, c_first, 0, 0)),
                  x.data.begin() +
                      long(x.index(n, c_first, 0, 0) + std::size_t(x.c - c_first) * plane),
                  second.data.begin() + long(second.index(n, 0, 0, 0)));
    }
}

nn::Tensor stack_batch(const nn::Tensor& a, const nn::Tensor& b) {
    if (a.c != b.c || a.h != b.h || a.w != b.w)
        throw std::invalid_argument("batch stack shape mismatch");
    nn::Tensor y(a.n + b.n, a.c, a.h, a.w);
    std::copy(a.data.begin(), a.data.end(), y.data.begin());
    std::copy(b.data.begin(), b.data.end(), y.data.begin() + long(a.data.size()));
    return y;
}

nn::Tensor take_batch_half(const nn::Tensor& x, bool second_half) {
    if (x.n % 2 != 0) throw std::invalid_argument("batch half of odd batch");
    nn::Tensor y(x.n / 2, x.c, x.h, x.w);
    const std::size_t len = y.data.size();
    std::copy(x.data.begin() + long(second_half ? len : 0),
              x.data.begin() + long(second_half ? 2 * len : len), y.data.begin());
    return y;
}

}  // namespace mcslam::completion
