#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mcslam/completion/net_util.hpp"
#include "mcslam/nn/ops.hpp"

namespace mcslam::completion {

struct GeneratorConfig {
    int size = 64;       // square input/output side
    int base = 16;       // first encoder width; deeper levels double it
    double dropout = 0.5;
    bool spectral_norm = true;
};

// Everything the backward pass needs from one training forward.
struct GenCache {
    LayerCache e1, e2, e3, e4, bn, d4, d3, d2, d1;
    nn::Tensor e1_pre, e2_pre, e3_pre, e4_pre, bn_pre, d4_pre, d3_pre, d2_pre;
    nn::Tensor e1_out, e2_out, e3_out;
    std::vector<std::uint8_t> d4_keep, d3_keep, d2_keep;
    nn::Tensor y;   // sigmoid output
};

struct GenGrads {
    std::array<LayerGrads, 9> layers;   // e1..e4, bn, d4..d1
};

// Strided-conv encoder, 3x3 bottleneck, transposed-conv decoder with skip
// concatenations, sigmoid head. Input and output are (batch, 2, size, size).
class Generator {
public:
    explicit Generator(const GeneratorConfig& cfg = {});

    void init(Rng& rng);

    const GeneratorConfig& config() const { return cfg_; }

    // Inference: stored spectral directions are reused, dropout runs only
    // when stochastic.
    nn::Tensor forward(const nn::Tensor& x, Rng& rng, bool stochastic);

    // Training: one power iteration per spectrally normalized weight,
    // decoder dropout always on.
    nn::Tensor forward_train(const nn::Tensor& x, Rng& rng, GenCache& cache);

    // Returns the gradient wrt the input; fills grads.
    nn::Tensor backward(const nn::Tensor& grad_y, const GenCache& cache, GenGrads& grads);

    void apply_adam(const GenGrads& grads, const nn::AdamConfig& cfg);

    std::vector<nn::ParamRef> param_refs();
    std::string arch_string() const;
    std::uint64_t arch_hash() const;

private:
    nn::Tensor run(const nn::Tensor& x, Rng& rng, bool dropout_on, int power_iters,
                   GenCache* cache);

    GeneratorConfig cfg_;
    Layer e1_, e2_, e3_, e4_, bn_, d4_, d3_, d2_, d1_;
};

}  // namespace mcslam::completion
