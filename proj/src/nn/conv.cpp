#include "mcslam/nn/conv.hpp"

#include <Eigen/Core>

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mcslam::nn {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapRM = Eigen::Map<MatRM>;
using ConstMapRM = Eigen::Map<const MatRM>;

int conv_out_dim(int in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

void check_geometry(const Tensor& x, const Tensor& kernel, int stride, int pad) {
    if (stride < 1) throw std::invalid_argument("conv stride must be >= 1");
    if (pad < 0) throw std::invalid_argument("conv pad must be >= 0");
    if (x.h + 2 * pad < kernel.h || x.w + 2 * pad < kernel.w)
        throw std::invalid_argument("conv kernel larger than padded input");
}

/* Patch matrix of one batch item: row (ci*kh+i)*kw+j, column oh*wo+ow holds
   x[n, ci, oh*stride-pad+i, ow*stride-pad+j], zero outside the input. */
void im2col(const Tensor& x, int n, int kh, int kw, int stride, int pad, int ho, int wo,
            std::vector<double>& col) {
    const int rows = x.c * kh * kw;
    col.assign(std::size_t(rows) * ho * wo, 0.0);
    for (int ci = 0; ci < x.c; ++ci)
        for (int i = 0; i < kh; ++i)
            for (int j = 0; j < kw; ++j) {
                const std::size_t row = (std::size_t(ci) * kh + i) * kw + j;
                double* dst = col.data() + row * std::size_t(ho) * wo;
                for (int oh = 0; oh < ho; ++oh) {
                    const int ih = oh * stride - pad + i;
                    if (ih < 0 || ih >= x.h) {
                        dst += wo;
                        continue;
                    }
                    const double* src = x.data.data() + x.index(n, ci, ih, 0);
                    for (int ow = 0; ow < wo; ++ow, ++dst) {
                        const int iw = ow * stride - pad + j;
                        if (iw >= 0 && iw < x.w) *dst = src[iw];
                    }
                }
            }
}

/* Adjoint of im2col: accumulates the patch matrix back into image layout. */
void col2im(const std::vector<double>& col, Tensor& x, int n, int kh, int kw, int stride,
            int pad, int ho, int wo) {
    for (int ci = 0; ci < x.c; ++ci)
        for (int i = 0; i < kh; ++i)
            for (int j = 0; j < kw; ++j) {
                const std::size_t row = (std::size_t(ci) * kh + i) * kw + j;
                const double* src = col.data() + row * std::size_t(ho) * wo;
                for (int oh = 0; oh < ho; ++oh) {
                    const int ih = oh * stride - pad + i;
                    if (ih < 0 || ih >= x.h) {
                        src += wo;
                        continue;
                    }
                    double* dst = x.data.data() + x.index(n, ci, ih, 0);
                    for (int ow = 0; ow < wo; ++ow, ++src) {
                        const int iw = ow * stride - pad + j;
                        if (iw >= 0 && iw < x.w) dst[iw] += *src;
                    }
                }
            }
}

Tensor conv_core(const Tensor& x, const Tensor& kernel, int stride, int pad) {
    check_geometry(x, kernel, stride, pad);
    if (x.c != kernel.c) throw std::invalid_argument("conv input channel mismatch");
    const int ho = conv_out_dim(x.h, kernel.h, stride, pad);
    const int wo = conv_out_dim(x.w, kernel.w, stride, pad);
    Tensor y(x.n, kernel.n, ho, wo);
    const int patch = kernel.c * kernel.h * kernel.w;
    ConstMapRM kmat(kernel.data.data(), kernel.n, patch);
    std::vector<double> col;
    for (int n = 0; n < x.n; ++n) {
        im2col(x, n, kernel.h, kernel.w, stride, pad, ho, wo, col);
        ConstMapRM cmat(col.data(), patch, std::size_t(ho) * wo);
        MapRM ymat(y.data.data() + y.index(n, 0, 0, 0), kernel.n, std::size_t(ho) * wo);
        ymat.noalias() = kmat * cmat;
    }
    return y;
}

Tensor conv_core_bwd_input(const Tensor& gy, const Tensor& kernel, int stride, int pad,
                           int in_h, int in_w) {
    if (gy.c != kernel.n) throw std::invalid_argument("conv grad channel mismatch");
    Tensor gx(gy.n, kernel.c, in_h, in_w);
    const int patch = kernel.c * kernel.h * kernel.w;
    ConstMapRM kmat(kernel.data.data(), kernel.n, patch);
    std::vector<double> col(std::size_t(patch) * gy.h * gy.w);
    for (int n = 0; n < gy.n; ++n) {
        ConstMapRM gmat(gy.data.data() + gy.index(n, 0, 0, 0), kernel.n,
                        std::size_t(gy.h) * gy.w);
        MapRM cmat(col.data(), patch, std::size_t(gy.h) * gy.w);
        cmat.noalias() = kmat.transpose() * gmat;
        col2im(col, gx, n, kernel.h, kernel.w, stride, pad, gy.h, gy.w);
    }
    return gx;
}

Tensor conv_core_bwd_kernel(const Tensor& x, const Tensor& gy, int stride, int pad, int kh,
                            int kw) {
    Tensor gk(gy.c, x.c, kh, kw);
    const int patch = x.c * kh * kw;
    MapRM gkmat(gk.data.data(), gy.c, patch);
    std::vector<double> col;
    for (int n = 0; n < x.n; ++n) {
        im2col(x, n, kh, kw, stride, pad, gy.h, gy.w, col);
        ConstMapRM cmat(col.data(), patch, std::size_t(gy.h) * gy.w);
        ConstMapRM gmat(gy.data.data() + gy.index(n, 0, 0, 0), gy.c,
                        std::size_t(gy.h) * gy.w);
        gkmat.noalias() += gmat * cmat.transpose();
    }
    return gk;
}

void check_bias(const ConvParams& p, int out_ch) {
    if (int(p.bias.size()) != out_ch)
        throw std::invalid_argument("conv bias size does not match output channels");
}

}  // namespace

Tensor conv2d_forward(const Tensor& x, const ConvParams& p, int stride, int pad) {
    check_bias(p, p.kernel.n);
    Tensor y = conv_core(x, p.kernel, stride, pad);
    for (int n = 0; n < y.n; ++n)
        for (int co = 0; co < y.c; ++co) {
            double* plane = y.data.data() + y.index(n, co, 0, 0);
            const double b = p.bias[std::size_t(co)];
            for (std::size_t i = 0; i < std::size_t(y.h) * y.w; ++i) plane[i] += b;
        }
    return y;
}

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& x, const ConvParams& p,
                          int stride, int pad) {
    if (grad_out.n != x.n || grad_out.c != p.kernel.n)
        throw std::invalid_argument("conv grad shape mismatch");
    ConvGrads g;
    g.input = conv_core_bwd_input(grad_out, p.kernel, stride, pad, x.h, x.w);
    g.kernel = conv_core_bwd_kernel(x, grad_out, stride, pad, p.kernel.h, p.kernel.w);
    g.bias.assign(std::size_t(p.kernel.n), 0.0);
    for (int n = 0; n < grad_out.n; ++n)
        for (int co = 0; co < grad_out.c; ++co) {
            const double* plane = grad_out.data.data() + grad_out.index(n, co, 0, 0);
            double s = 0.0;
            for (std::size_t i = 0; i < std::size_t(grad_out.h) * grad_out.w; ++i)
                s += plane[i];
            g.bias[std::size_t(co)] += s;
        }
    return g;
}

Tensor tconv2d_forward(const Tensor& x, const ConvParams& p, int stride, int pad) {
    if (x.c != p.kernel.n) throw std::invalid_argument("tconv input channel mismatch");
    check_bias(p, p.kernel.c);
    const int ho = (x.h - 1) * stride - 2 * pad + p.kernel.h;
    const int wo = (x.w - 1) * stride - 2 * pad + p.kernel.w;
    if (ho < 1 || wo < 1) throw std::invalid_argument("tconv output dims not positive");
    Tensor y = conv_core_bwd_input(x, p.kernel, stride, pad, ho, wo);
    for (int n = 0; n < y.n; ++n)
        for (int co = 0; co < y.c; ++co) {
            double* plane = y.data.data() + y.index(n, co, 0, 0);
            const double b = p.bias[std::size_t(co)];
            for (std::size_t i = 0; i < std::size_t(y.h) * y.w; ++i) plane[i] += b;
        }
    return y;
}

ConvGrads tconv2d_backward(const Tensor& grad_out, const Tensor& x, const ConvParams& p,
                           int stride, int pad) {
    if (grad_out.n != x.n || grad_out.c != p.kernel.c)
        throw std::invalid_argument("tconv grad shape mismatch");
    ConvGrads g;
    g.input = conv_core(grad_out, p.kernel, stride, pad);
    g.kernel = conv_core_bwd_kernel(grad_out, x, stride, pad, p.kernel.h, p.kernel.w);
    g.bias.assign(std::size_t(p.kernel.c), 0.0);
    for (int n = 0; n < grad_out.n; ++n)
        for (int co = 0; co < grad_out.c; ++co) {
            const double* plane = grad_out.data.data() + grad_out.index(n, co, 0, 0);
            double s = 0.0;
            for (std::size_t i = 0; i < std::size_t(grad_out.h) * grad_out.w; ++i)
                s += plane[i];
            g.bias[std::size_t(co)] += s;
        }
    return g;
}

}  // namespace mcslam::nn
