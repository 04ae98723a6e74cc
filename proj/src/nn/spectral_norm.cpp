#include "mcslam/nn/spectral_norm.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace mcslam::nn {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

Vec normalized_or_zero(const Vec& x) {
    const double n = x.norm();
    return n > 0.0 ? Vec(x / n) : Vec(Vec::Zero(x.size()));
}

}  // namespace

SpectralNormResult spectral_normalize(ConvParams& p, int power_iters) {
    if (power_iters < 0) throw std::invalid_argument("power_iters must be >= 0");
    const int rows = p.kernel.n;
    const int cols = p.kernel.c * p.kernel.h * p.kernel.w;
    if (rows < 1 || cols < 1) throw std::invalid_argument("spectral norm on empty kernel");

    if (int(p.sn_u.size()) != rows) {
        Rng rng(0x5eed5u);
        p.sn_u.assign(std::size_t(rows), 0.0);
        double norm_sq = 0.0;
        for (auto& x : p.sn_u) {
            x = rng.gaussian(1.0);
            norm_sq += x * x;
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (auto& x : p.sn_u) x *= inv;
    }

    Eigen::Map<const MatRM> w(p.kernel.data.data(), rows, cols);
    Eigen::Map<Vec> u_store(p.sn_u.data(), rows);
    Vec u = u_store;
    Vec v = normalized_or_zero(w.transpose() * u);
    for (int it = 0; it < power_iters; ++it) {
        u = normalized_or_zero(w * v);
        v = normalized_or_zero(w.transpose() * u);
    }
    if (power_iters > 0) u_store = u;

    double sigma = u.dot(w * v);
    if (sigma < 1e-12) sigma = 1e-12;

    SpectralNormResult r;
    r.kernel = p.kernel;
    const double inv_sigma = 1.0 / sigma;
    for (auto& x : r.kernel.data) x *= inv_sigma;
    r.sigma = sigma;
    r.u.assign(u.data(), u.data() + u.size());
    r.v.assign(v.data(), v.data() + v.size());
    return r;
}

Tensor spectral_norm_backward(const Tensor& grad_norm, const SpectralNormResult& sn) {
    if (!grad_norm.same_shape(sn.kernel))
        throw std::invalid_argument("spectral norm grad shape mismatch");
    const int rows = sn.kernel.n;
    const int cols = sn.kernel.c * sn.kernel.h * sn.kernel.w;
    double inner = 0.0;
    for (std::size_t i = 0; i < grad_norm.data.size(); ++i)
        inner += grad_norm.data[i] * sn.kernel.data[i];
    Tensor g = grad_norm;
    const double inv_sigma = 1.0 / sn.sigma;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = std::size_t(r) * cols + c;
            g.data[i] = (g.data[i] - inner * sn.u[std::size_t(r)] * sn.v[std::size_t(c)]) *
                        inv_sigma;
        }
    return g;
}

}  // namespace mcslam::nn
