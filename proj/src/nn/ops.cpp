#include "mcslam/nn/ops.hpp"

#include <cmath>
#include <stdexcept>

namespace mcslam::nn {

Tensor leaky_relu(const Tensor& x, double slope) {
    Tensor y = x;
    for (auto& v : y.data)
        if (v < 0.0) v *= slope;
    return y;
}

Tensor leaky_relu_backward(const Tensor& grad, const Tensor& x, double slope) {
    if (!grad.same_shape(x)) throw std::invalid_argument("leaky_relu grad shape mismatch");
    Tensor g = grad;
    for (std::size_t i = 0; i < g.data.size(); ++i)
        if (x.data[i] < 0.0) g.data[i] *= slope;
    return g;
}

Tensor sigmoid(const Tensor& x) {
    Tensor y = x;
    for (auto& v : y.data) v = 1.0 / (1.0 + std::exp(-v));
    return y;
}

Tensor sigmoid_backward(const Tensor& grad, const Tensor& y) {
    if (!grad.same_shape(y)) throw std::invalid_argument("sigmoid grad shape mismatch");
    Tensor g = grad;
    for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] *= y.data[i] * (1.0 - y.data[i]);
    return g;
}

DropoutResult dropout(const Tensor& x, double rate, Rng& rng, bool train) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
    DropoutResult r;
    r.y = x;
    r.keep.assign(x.size(), 1);
    if (!train || rate == 0.0) return r;
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < r.y.data.size(); ++i) {
        if (rng.uniform() < rate) {
            r.y.data[i] = 0.0;
            r.keep[i] = 0;
        } else {
            r.y.data[i] *= scale;
        }
    }
    return r;
}

Tensor dropout_backward(const Tensor& grad, const std::vector<std::uint8_t>& keep, double rate) {
    if (grad.size() != keep.size()) throw std::invalid_argument("dropout grad shape mismatch");
    Tensor g = grad;
    const double scale = 1.0 / (1.0 - rate);
    for (std::size_t i = 0; i < g.data.size(); ++i)
        g.data[i] = keep[i] ? g.data[i] * scale : 0.0;
    return g;
}

}  // namespace mcslam::nn
