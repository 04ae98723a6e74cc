#pragma once

#include "mcslam/completion/discriminator.hpp"
#include "mcslam/completion/generator.hpp"

namespace mcslam::completion {

struct L2Loss {
    double value = 0.0;
    nn::Tensor grad;
};

// Mean squared error over every element; gradient is exact.
L2Loss l2_loss(const nn::Tensor& pred, const nn::Tensor& target);

struct GanStepResult {
    double d_loss = 0.0;
    double g_loss = 0.0;       // adversarial term + lambda * l2
    double g_adv = 0.0;
    double l2 = 0.0;
    GenGrads g_grads;
    DiscGrads d_grads;
};

// One adversarial step on a packed batch: cond and real are (B, 2, size, size).
// d_loss = -E[log D(real|cond)] - E[log(1 - D(fake|cond))],
// g_loss = -E[log D(fake|cond)] + lambda * L2(fake, real),
// with expectations over batch entries and discriminator patches. The fake
// sample comes from one stochastic generator forward shared by both losses;
// the discriminator treats it as a constant. Throws on a non-finite loss,
// naming the batch index.
GanStepResult gan_losses(Generator& g, Discriminator& d, const nn::Tensor& cond,
                         const nn::Tensor& real, double lambda, Rng& rng);

}  // namespace mcslam::completion
