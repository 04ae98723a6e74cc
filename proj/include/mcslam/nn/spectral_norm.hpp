#pragma once

#include <vector>

#include "mcslam/nn/conv.hpp"

namespace mcslam::nn {

// Weight divided by its estimated top singular value, plus the vectors the
// estimate used. u and v are unit left/right singular vector estimates of
// the kernel viewed as a (first_dim, rest) matrix.
struct SpectralNormResult {
    Tensor kernel;
    double sigma = 0.0;
    std::vector<double> u;
    std::vector<double> v;
};

// Runs power_iters power-iteration updates on p.sn_u (persisted across
// calls, seeded deterministically on first use), estimates sigma = u^T W v,
// and returns W / sigma. power_iters = 0 reuses the stored u unchanged.
// sigma is floored at 1e-12.
SpectralNormResult spectral_normalize(ConvParams& p, int power_iters = 1);

// Gradient through W / sigma treating u and v as constants:
// gW = (gWbar - <gWbar, Wbar> u v^T) / sigma.
Tensor spectral_norm_backward(const Tensor& grad_norm, const SpectralNormResult& sn);

}  // namespace mcslam::nn
