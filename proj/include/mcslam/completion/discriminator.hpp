#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mcslam/completion/net_util.hpp"
#include "mcslam/nn/ops.hpp"

namespace mcslam::completion {

struct DiscriminatorConfig {
    int size = 64;
    int base = 32;
};

struct DiscCache {
    LayerCache c1, c2, c3, head;
    nn::Tensor c1_pre, c2_pre, c3_pre;
};

struct DiscGrads {
    std::array<LayerGrads, 4> layers;
};

// Conditional patch critic: input is concat(condition, candidate) with 4
// channels; output is per-patch logits (batch, 1, size/8, size/8). Every
// weight is spectrally normalized.
class Discriminator {
public:
    explicit Discriminator(const DiscriminatorConfig& cfg = {});

    void init(Rng& rng);

    const DiscriminatorConfig& config() const { return cfg_; }

    nn::Tensor forward(const nn::Tensor& x);                      // stored directions, no update
    nn::Tensor forward_train(const nn::Tensor& x, DiscCache& cache);

    // Gradient wrt the 4-channel input; grads may be null to skip parameter
    // gradients (used when only the generator needs the signal).
    nn::Tensor backward(const nn::Tensor& grad_logits, const DiscCache& cache, DiscGrads* grads);

    void apply_adam(const DiscGrads& grads, const nn::AdamConfig& cfg);

    std::vector<nn::ParamRef> param_refs();
    std::string arch_string() const;
    std::uint64_t arch_hash() const;

private:
    nn::Tensor run(const nn::Tensor& x, int power_iters, DiscCache* cache);

    DiscriminatorConfig cfg_;
    Layer c1_, c2_, c3_, head_;
};

}  // namespace mcslam::completion
