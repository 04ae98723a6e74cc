#include "mcslam/completion/discriminator.hpp"

#include <stdexcept>

namespace mcslam::completion {

namespace {
constexpr double kLeakySlope = 0.2;
}

Discriminator::Discriminator(const DiscriminatorConfig& cfg) : cfg_(cfg) {
    if (cfg.size % 8 != 0 || cfg.size < 8)
        throw std::invalid_argument("discriminator size must be a positive multiple of 8");
    if (cfg.base < 1) throw std::invalid_argument("discriminator base width must be positive");
}

void Discriminator::init(Rng& rng) {
    const int b = cfg_.base;
    init_layer(c1_, "c1", b, 4, 4, 4, false, 2, 1, rng, true);
    init_layer(c2_, "c2", 2 * b, b, 4, 4, false, 2, 1, rng, true);
    init_layer(c3_, "c3", 4 * b, 2 * b, 4, 4, false, 2, 1, rng, true);
    init_layer(head_, "head", 1, 4 * b, 3, 3, false, 1, 1, rng, true);
}

nn::Tensor Discriminator::run(const nn::Tensor& x, int power_iters, DiscCache* cache) {
    if (x.c != 4 || x.h != cfg_.size || x.w != cfg_.size)
        throw std::invalid_argument("discriminator input must be (batch, 4, size, size)");
    nn::Tensor c1p = layer_forward(c1_, x, true, power_iters, cache ? &cache->c1 : nullptr);
    nn::Tensor c1o = nn::leaky_relu(c1p, kLeakySlope);
    nn::Tensor c2p = layer_forward(c2_, c1o, true, power_iters, cache ? &cache->c2 : nullptr);
    nn::Tensor c2o = nn::leaky_relu(c2p, kLeakySlope);
    nn::Tensor c3p = layer_forward(c3_, c2o, true, power_iters, cache ? &cache->c3 : nullptr);
    nn::Tensor c3o = nn::leaky_relu(c3p, kLeakySlope);
    nn::Tensor logits =
        layer_forward(head_, c3o, true, power_iters, cache ? &cache->head : nullptr);
    if (cache) {
        cache->c1_pre = std::move(c1p);
        cache->c2_pre = std::move(c2p);
        cache->c3_pre = std::move(c3p);
    }
    return logits;
}

nn::Tensor Discriminator::forward(const nn::Tensor& x) { return run(x, 0, nullptr); }

nn::Tensor Discriminator::forward_train(const nn::Tensor& x, DiscCache& cache) {
    return run(x, 1, &cache);
}

nn::Tensor Discriminator::backward(const nn::Tensor& grad_logits, const DiscCache& cache,
                                   DiscGrads* grads) {
    nn::Tensor g_c3o = layer_backward(head_, grad_logits, cache.head,
                                      grads ? &grads->layers[3] : nullptr);
    nn::Tensor g_c3p = nn::leaky_relu_backward(g_c3o, cache.c3_pre, kLeakySlope);
    nn::Tensor g_c2o = layer_backward(c3_, g_c3p, cache.c3, grads ? &grads->layers[2] : nullptr);
    nn::Tensor g_c2p = nn::leaky_relu_backward(g_c2o, cache.c2_pre, kLeakySlope);
    nn::Tensor g_c1o = layer_backward(c2_, g_c2p, cache.c2, grads ? &grads->layers[1] : nullptr);
    nn::Tensor g_c1p = nn::leaky_relu_backward(g_c1o, cache.c1_pre, kLeakySlope);
    return layer_backward(c1_, g_c1p, cache.c1, grads ? &grads->layers[0] : nullptr);
}

void Discriminator::apply_adam(const DiscGrads& grads, const nn::AdamConfig& cfg) {
    Layer* layers[4] = {&c1_, &c2_, &c3_, &head_};
    for (int i = 0; i < 4; ++i) layer_adam(*layers[i], grads.layers[std::size_t(i)], cfg);
}

std::vector<nn::ParamRef> Discriminator::param_refs() {
    std::vector<nn::ParamRef> refs;
    Layer* layers[4] = {&c1_, &c2_, &c3_, &head_};
    for (auto* l : layers) layer_param_refs(*l, true, refs);
    return refs;
}

std::string Discriminator::arch_string() const {
    return "patch-d size=" + std::to_string(cfg_.size) + " base=" + std::to_string(cfg_.base) +
           " levels=3 head=3x3 sn=1 io=4ch";
}

std::uint64_t Discriminator::arch_hash() const { return nn::fnv1a64(arch_string()); }

}  // namespace mcslam::completion
