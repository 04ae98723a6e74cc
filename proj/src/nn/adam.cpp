#include "mcslam/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mcslam::nn {

void adam_step(std::vector<double>& param, const std::vector<double>& grad, AdamState& state,
               const AdamConfig& cfg) {
    if (param.size() != grad.size()) throw std::invalid_argument("adam shape mismatch");
    if (state.m.empty()) {
        state.m.assign(param.size(), 0.0);
        state.v.assign(param.size(), 0.0);
    }
    if (state.m.size() != param.size()) throw std::invalid_argument("adam state shape mismatch");
    for (double g : grad)
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.step));
    for (std::size_t i = 0; i < param.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double mh = state.m[i] / bc1;
        const double vh = state.v[i] / bc2;
        param[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
    }
}

}  // namespace mcslam::nn
