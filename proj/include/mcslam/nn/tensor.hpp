#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mcslam/util/rng.hpp"

namespace mcslam::nn {

// Dense (batch, channels, height, width) array of doubles, row-major with
// width fastest.
struct Tensor {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int n_, int c_, int h_, int w_)
        : n(n_), c(c_), h(h_), w(w_),
          data(std::size_t(n_) * std::size_t(c_) * std::size_t(h_) * std::size_t(w_), 0.0) {
        if (n_ < 0 || c_ < 0 || h_ < 0 || w_ < 0)
            throw std::invalid_argument("tensor dims must be nonnegative");
    }

    std::size_t size() const { return data.size(); }

    std::size_t index(int in, int ic, int ih, int iw) const {
        return ((std::size_t(in) * c + ic) * h + ih) * w + iw;
    }

    double& at(int in, int ic, int ih, int iw) { return data[index(in, ic, ih, iw)]; }
    double at(int in, int ic, int ih, int iw) const { return data[index(in, ic, ih, iw)]; }

    bool same_shape(const Tensor& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
};

inline Tensor randn(int n, int c, int h, int w, Rng& rng, double stddev) {
    Tensor t(n, c, h, w);
    for (auto& x : t.data) x = rng.gaussian(stddev);
    return t;
}

}  // namespace mcslam::nn
