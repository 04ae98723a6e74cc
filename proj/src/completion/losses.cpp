#include "mcslam/completion/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mcslam::completion {

L2Loss l2_loss(const nn::Tensor& pred, const nn::Tensor& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("l2 loss shape mismatch");
    L2Loss r;
    r.grad = nn::Tensor(pred.n, pred.c, pred.h, pred.w);
    const double inv_n = 1.0 / double(pred.data.size());
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        r.value += d * d * inv_n;
        r.grad.data[i] = 2.0 * d * inv_n;
    }
    return r;
}

GanStepResult gan_losses(Generator& g, Discriminator& d, const nn::Tensor& cond,
                         const nn::Tensor& real, double lambda, Rng& rng) {
    if (!cond.same_shape(real)) throw std::invalid_argument("gan batch shape mismatch");
    if (cond.n < 1) throw std::invalid_argument("gan batch is empty");
    if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");

    GanStepResult r;
    GenCache g_cache;
    nn::Tensor fake = g.forward_train(cond, rng, g_cache);

    /* one discriminator pass covers both halves so the power iteration
       advances once per step */
    nn::Tensor d_in = stack_batch(concat_channels(cond, real), concat_channels(cond, fake));
    DiscCache d_cache;
    nn::Tensor logits = d.forward_train(d_in, d_cache);
    nn::Tensor s = nn::sigmoid(logits);

    const int batch = cond.n;
    const std::size_t patches = std::size_t(logits.c) * logits.h * logits.w;
    const double inv = 1.0 / (double(batch) * double(patches));

    nn::Tensor dz_d(logits.n, logits.c, logits.h, logits.w);
    nn::Tensor dz_g(logits.n, logits.c, logits.h, logits.w);
    for (int n = 0; n < batch; ++n) {
        double sample_d = 0.0, sample_g = 0.0;
        for (std::size_t i = 0; i < patches; ++i) {
            const std::size_t ri = s.index(n, 0, 0, 0) + i;
            const std::size_t fi = s.index(n + batch, 0, 0, 0) + i;
            sample_d += -std::log(s.data[ri]) - std::log(1.0 - s.data[fi]);
            sample_g += -std::log(s.data[fi]);
            dz_d.data[ri] = (s.data[ri] - 1.0) * inv;
            dz_d.data[fi] = s.data[fi] * inv;
            dz_g.data[fi] = (s.data[fi] - 1.0) * inv;
        }
        if (!std::isfinite(sample_d) || !std::isfinite(sample_g))
            throw std::runtime_error("non-finite loss at batch index " + std::to_string(n));
        r.d_loss += sample_d * inv;
        r.g_adv += sample_g * inv;
    }

    d.backward(dz_d, d_cache, &r.d_grads);

    nn::Tensor g_din = d.backward(dz_g, d_cache, nullptr);
    nn::Tensor fake_half = take_batch_half(g_din, true);
    nn::Tensor cond_grad_unused, grad_fake;
    split_channels(fake_half, 2, cond_grad_unused, grad_fake);

    L2Loss rec = l2_loss(fake, real);
    if (!std::isfinite(rec.value)) throw std::runtime_error("non-finite loss at batch index 0");
    r.l2 = rec.value;
    for (std::size_t i = 0; i < grad_fake.data.size(); ++i)
        grad_fake.data[i] += lambda * rec.grad.data[i];

    g.backward(grad_fake, g_cache, r.g_grads);

    r.g_loss = r.g_adv + lambda * rec.value;
    return r;
}

}  // namespace mcslam::completion
