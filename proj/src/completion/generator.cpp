#include "mcslam/completion/generator.hpp"

#include <stdexcept>

namespace mcslam::completion {

namespace {

constexpr double kLeakySlope = 0.2;

nn::Tensor add_tensors(const nn::Tensor& a, const nn::Tensor& b) {
    nn::Tensor y = a;
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += b.data[i];
    return y;
}

}  // namespace

Generator::Generator(const GeneratorConfig& cfg) : cfg_(cfg) {
    if (cfg.size % 16 != 0 || cfg.size < 16)
        throw std::invalid_argument("generator size must be a positive multiple of 16");
    if (cfg.base < 1) throw std::invalid_argument("generator base width must be positive");
}

void Generator::init(Rng& rng) {
    const int b = cfg_.base;
    const bool sn = cfg_.spectral_norm;
    init_layer(e1_, "e1", b, 2, 4, 4, false, 2, 1, rng, sn);
    init_layer(e2_, "e2", 2 * b, b, 4, 4, false, 2, 1, rng, sn);
    init_layer(e3_, "e3", 4 * b, 2 * b, 4, 4, false, 2, 1, rng, sn);
    init_layer(e4_, "e4", 8 * b, 4 * b, 4, 4, false, 2, 1, rng, sn);
    init_layer(bn_, "bn", 8 * b, 8 * b, 3, 3, false, 1, 1, rng, sn);
    init_layer(d4_, "d4", 8 * b, 4 * b, 4, 4, true, 2, 1, rng, sn);   /* in 8b -> out 4b */
    init_layer(d3_, "d3", 8 * b, 2 * b, 4, 4, true, 2, 1, rng, sn);   /* cat(4b,4b) -> 2b */
    init_layer(d2_, "d2", 4 * b, b, 4, 4, true, 2, 1, rng, sn);       /* cat(2b,2b) -> b */
    init_layer(d1_, "d1", 2 * b, 2, 4, 4, true, 2, 1, rng, sn);       /* cat(b,b) -> 2 */
}

nn::Tensor Generator::run(const nn::Tensor& x, Rng& rng, bool dropout_on, int power_iters,
                          GenCache* cache) {
    if (x.c != 2 || x.h != cfg_.size || x.w != cfg_.size)
        throw std::invalid_argument("generator input must be (batch, 2, size, size)");
    const bool sn = cfg_.spectral_norm;
    auto* cc = cache;

    nn::Tensor e1p = layer_forward(e1_, x, sn, power_iters, cc ? &cc->e1 : nullptr);
    nn::Tensor e1o = nn::leaky_relu(e1p, kLeakySlope);
    nn::Tensor e2p = layer_forward(e2_, e1o, sn, power_iters, cc ? &cc->e2 : nullptr);
    nn::Tensor e2o = nn::leaky_relu(e2p, kLeakySlope);
    nn::Tensor e3p = layer_forward(e3_, e2o, sn, power_iters, cc ? &cc->e3 : nullptr);
    nn::Tensor e3o = nn::leaky_relu(e3p, kLeakySlope);
    nn::Tensor e4p = layer_forward(e4_, e3o, sn, power_iters, cc ? &cc->e4 : nullptr);
    nn::Tensor e4o = nn::leaky_relu(e4p, kLeakySlope);

    nn::Tensor bnp = layer_forward(bn_, e4o, sn, power_iters, cc ? &cc->bn : nullptr);
    nn::Tensor bno = nn::leaky_relu(bnp, 0.0);

    nn::Tensor d4p = layer_forward(d4_, bno, sn, power_iters, cc ? &cc->d4 : nullptr);
    nn::Tensor d4a = nn::leaky_relu(d4p, 0.0);
    nn::DropoutResult d4d = nn::dropout(d4a, cfg_.dropout, rng, dropout_on);
    nn::Tensor cat4 = concat_channels(d4d.y, e3o);

    nn::Tensor d3p = layer_forward(d3_, cat4, sn, power_iters, cc ? &cc->d3 : nullptr);
    nn::Tensor d3a = nn::leaky_relu(d3p, 0.0);
    nn::DropoutResult d3d = nn::dropout(d3a, cfg_.dropout, rng, dropout_on);
    nn::Tensor cat3 = concat_channels(d3d.y, e2o);

    nn::Tensor d2p = layer_forward(d2_, cat3, sn, power_iters, cc ? &cc->d2 : nullptr);
    nn::Tensor d2a = nn::leaky_relu(d2p, 0.0);
    nn::DropoutResult d2d = nn::dropout(d2a, cfg_.dropout, rng, dropout_on);
    nn::Tensor cat2 = concat_channels(d2d.y, e1o);

    nn::Tensor d1p = layer_forward(d1_, cat2, sn, power_iters, cc ? &cc->d1 : nullptr);
    nn::Tensor y = nn::sigmoid(d1p);

    if (cc) {
        cc->e1_pre = std::move(e1p);
        cc->e2_pre = std::move(e2p);
        cc->e3_pre = std::move(e3p);
        cc->e4_pre = std::move(e4p);
        cc->bn_pre = std::move(bnp);
        cc->d4_pre = std::move(d4p);
        cc->d3_pre = std::move(d3p);
        cc->d2_pre = std::move(d2p);
        cc->e1_out = std::move(e1o);
        cc->e2_out = std::move(e2o);
        cc->e3_out = std::move(e3o);
        cc->d4_keep = std::move(d4d.keep);
        cc->d3_keep = std::move(d3d.keep);
        cc->d2_keep = std::move(d2d.keep);
        cc->y = y;
    }
    return y;
}

nn::Tensor Generator::forward(const nn::Tensor& x, Rng& rng, bool stochastic) {
    return run(x, rng, stochastic, 0, nullptr);
}

nn::Tensor Generator::forward_train(const nn::Tensor& x, Rng& rng, GenCache& cache) {
    return run(x, rng, true, 1, &cache);
}

nn::Tensor Generator::backward(const nn::Tensor& grad_y, const GenCache& cache,
                               GenGrads& grads) {
    const double rate = cfg_.dropout;

    nn::Tensor g = nn::sigmoid_backward(grad_y, cache.y);
    nn::Tensor g_cat2 = layer_backward(d1_, g, cache.d1, &grads.layers[8]);
    nn::Tensor g_d2drop, g_e1out;
    split_channels(g_cat2, cfg_.base, g_d2drop, g_e1out);

    nn::Tensor g_d2a = nn::dropout_backward(g_d2drop, cache.d2_keep, rate);
    nn::Tensor g_d2p = nn::leaky_relu_backward(g_d2a, cache.d2_pre, 0.0);
    nn::Tensor g_cat3 = layer_backward(d2_, g_d2p, cache.d2, &grads.layers[7]);
    nn::Tensor g_d3drop, g_e2out;
    split_channels(g_cat3, 2 * cfg_.base, g_d3drop, g_e2out);

    nn::Tensor g_d3a = nn::dropout_backward(g_d3drop, cache.d3_keep, rate);
    nn::Tensor g_d3p = nn::leaky_relu_backward(g_d3a, cache.d3_pre, 0.0);
    nn::Tensor g_cat4 = layer_backward(d3_, g_d3p, cache.d3, &grads.layers[6]);
    nn::Tensor g_d4drop, g_e3out;
    split_channels(g_cat4, 4 * cfg_.base, g_d4drop, g_e3out);

    nn::Tensor g_d4a = nn::dropout_backward(g_d4drop, cache.d4_keep, rate);
    nn::Tensor g_d4p = nn::leaky_relu_backward(g_d4a, cache.d4_pre, 0.0);
    nn::Tensor g_bnout = layer_backward(d4_, g_d4p, cache.d4, &grads.layers[5]);

    nn::Tensor g_bnp = nn::leaky_relu_backward(g_bnout, cache.bn_pre, 0.0);
    nn::Tensor g_e4out = layer_backward(bn_, g_bnp, cache.bn, &grads.layers[4]);

    nn::Tensor g_e4p = nn::leaky_relu_backward(g_e4out, cache.e4_pre, kLeakySlope);
    nn::Tensor g_e3total = add_tensors(layer_backward(e4_, g_e4p, cache.e4, &grads.layers[3]),
                                       g_e3out);

    nn::Tensor g_e3p = nn::leaky_relu_backward(g_e3total, cache.e3_pre, kLeakySlope);
    nn::Tensor g_e2total = add_tensors(layer_backward(e3_, g_e3p, cache.e3, &grads.layers[2]),
                                       g_e2out);

    nn::Tensor g_e2p = nn::leaky_relu_backward(g_e2total, cache.e2_pre, kLeakySlope);
    nn::Tensor g_e1total = add_tensors(layer_backward(e2_, g_e2p, cache.e2, &grads.layers[1]),
                                       g_e1out);

    nn::Tensor g_e1p = nn::leaky_relu_backward(g_e1total, cache.e1_pre, kLeakySlope);
    return layer_backward(e1_, g_e1p, cache.e1, &grads.layers[0]);
}

void Generator::apply_adam(const GenGrads& grads, const nn::AdamConfig& cfg) {
    Layer* layers[9] = {&e1_, &e2_, &e3_, &e4_, &bn_, &d4_, &d3_, &d2_, &d1_};
    for (int i = 0; i < 9; ++i) layer_adam(*layers[i], grads.layers[std::size_t(i)], cfg);
}

std::vector<nn::ParamRef> Generator::param_refs() {
    std::vector<nn::ParamRef> refs;
    Layer* layers[9] = {&e1_, &e2_, &e3_, &e4_, &bn_, &d4_, &d3_, &d2_, &d1_};
    for (auto* l : layers) layer_param_refs(*l, cfg_.spectral_norm, refs);
    return refs;
}

std::string Generator::arch_string() const {
    return "unet-g size=" + std::to_string(cfg_.size) + " base=" + std::to_string(cfg_.base) +
           " sn=" + (cfg_.spectral_norm ? "1" : "0") +
           " levels=4 bottleneck=3x3 head=sigmoid io=2ch";
}

std::uint64_t Generator::arch_hash() const { return nn::fnv1a64(arch_string()); }

}  // namespace mcslam::completion
