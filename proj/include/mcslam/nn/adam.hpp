#pragma once

#include <cstdint>
#include <vector>

namespace mcslam::nn {

struct AdamConfig {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One state per parameter block; moments sized lazily on first step.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
};

// Bias-corrected adaptive-moment update, in place. Throws on non-finite
// gradients.
void adam_step(std::vector<double>& param, const std::vector<double>& grad, AdamState& state,
               const AdamConfig& cfg);

}  // namespace mcslam::nn
