#include "lmk/nn.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace lmk::nn {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

double kaiming_bound(int fan_in) { return std::sqrt(6.0 / static_cast<double>(fan_in)); }

static void init_uniform(Tensor& t, double bound, Rng& rng) {
    for (auto& v : t.data) v = rng.uniform(-bound, bound);
}

// ---------------------------------------------------------------------------
// Conv2d
// ---------------------------------------------------------------------------

Conv2d::Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, bool bias, Rng& rng)
    : in_ch_(in_ch),
      out_ch_(out_ch),
      kernel_(kernel),
      stride_(stride),
      pad_(pad),
      has_bias_(bias),
      weight_({out_ch, in_ch * kernel * kernel}) {
    init_uniform(weight_.value, kaiming_bound(in_ch * kernel * kernel), rng);
    if (has_bias_) {
        bias_ = std::make_unique<Param>(std::vector<int>{out_ch}, false);
        init_uniform(bias_->value, kaiming_bound(in_ch * kernel * kernel), rng);
    }
}

static void im2col(const double* x, int c, int h, int w, int kernel, int stride, int pad,
                   int out_h, int out_w, double* cols) {
    // cols layout: (c*kernel*kernel) x (out_h*out_w), row-major
    const int ow_count = out_h * out_w;
    for (int ch = 0; ch < c; ++ch) {
        for (int ki = 0; ki < kernel; ++ki) {
            for (int kj = 0; kj < kernel; ++kj) {
                double* row = cols + ((ch * kernel + ki) * kernel + kj) * ow_count;
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * stride - pad + ki;
                    if (iy < 0 || iy >= h) {
                        std::fill(row + oy * out_w, row + (oy + 1) * out_w, 0.0);
                        continue;
                    }
                    const double* src = x + (ch * h + iy) * w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * stride - pad + kj;
                        row[oy * out_w + ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0;
                    }
                }
            }
        }
    }
}

static void col2im_add(const double* cols, int c, int h, int w, int kernel, int stride, int pad,
                       int out_h, int out_w, double* gx) {
    const int ow_count = out_h * out_w;
    for (int ch = 0; ch < c; ++ch) {
        for (int ki = 0; ki < kernel; ++ki) {
            for (int kj = 0; kj < kernel; ++kj) {
                const double* row = cols + ((ch * kernel + ki) * kernel + kj) * ow_count;
                for (int oy = 0; oy < out_h; ++oy) {
                    const int iy = oy * stride - pad + ki;
                    if (iy < 0 || iy >= h) continue;
                    double* dst = gx + (ch * h + iy) * w;
                    for (int ox = 0; ox < out_w; ++ox) {
                        const int ix = ox * stride - pad + kj;
                        if (ix >= 0 && ix < w) dst[ix] += row[oy * out_w + ox];
                    }
                }
            }
        }
    }
}

Tensor Conv2d::forward(const Tensor& x) {
    if (x.ndim() != 4 || x.dim(1) != in_ch_)
        throw std::invalid_argument("Conv2d: expected (N," + std::to_string(in_ch_) +
                                    ",H,W), got " + x.shape_str());
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    out_h_ = (h + 2 * pad_ - kernel_) / stride_ + 1;
    out_w_ = (w + 2 * pad_ - kernel_) / stride_ + 1;
    if (out_h_ < 1 || out_w_ < 1)
        throw std::invalid_argument("Conv2d: input " + x.shape_str() + " too small for kernel");
    x_shape_ = x.shape;

    const int ckk = in_ch_ * kernel_ * kernel_;
    const int hw = out_h_ * out_w_;
    cols_ = Tensor({n, ckk, hw});
    Tensor y({n, out_ch_, out_h_, out_w_});

    CMapMat wmat(weight_.value.ptr(), out_ch_, ckk);
    for (int i = 0; i < n; ++i) {
        double* cols_n = cols_.ptr() + static_cast<std::int64_t>(i) * ckk * hw;
        im2col(x.ptr() + static_cast<std::int64_t>(i) * in_ch_ * h * w, in_ch_, h, w, kernel_,
               stride_, pad_, out_h_, out_w_, cols_n);
        MapMat out_n(y.ptr() + static_cast<std::int64_t>(i) * out_ch_ * hw, out_ch_, hw);
        out_n.noalias() = wmat * CMapMat(cols_n, ckk, hw);
    }
    if (has_bias_) {
        for (int i = 0; i < n; ++i)
            for (int oc = 0; oc < out_ch_; ++oc) {
                double* dst = y.ptr() + (static_cast<std::int64_t>(i) * out_ch_ + oc) * hw;
                const double b = bias_->value[oc];
                for (int k = 0; k < hw; ++k) dst[k] += b;
            }
    }
    return y;
}

Tensor Conv2d::backward(const Tensor& gy) {
    const int n = x_shape_[0], h = x_shape_[2], w = x_shape_[3];
    const int ckk = in_ch_ * kernel_ * kernel_;
    const int hw = out_h_ * out_w_;
    Tensor gx(x_shape_);
    Tensor gcols({ckk, hw});

    MapMat gw(weight_.grad.ptr(), out_ch_, ckk);
    CMapMat wmat(weight_.value.ptr(), out_ch_, ckk);
    for (int i = 0; i < n; ++i) {
        CMapMat gy_n(gy.ptr() + static_cast<std::int64_t>(i) * out_ch_ * hw, out_ch_, hw);
        CMapMat cols_n(cols_.ptr() + static_cast<std::int64_t>(i) * ckk * hw, ckk, hw);
        gw.noalias() += gy_n * cols_n.transpose();
        MapMat gcols_m(gcols.ptr(), ckk, hw);
        gcols_m.noalias() = wmat.transpose() * gy_n;
        col2im_add(gcols.ptr(), in_ch_, h, w, kernel_, stride_, pad_, out_h_, out_w_,
                   gx.ptr() + static_cast<std::int64_t>(i) * in_ch_ * h * w);
        if (has_bias_)
            for (int oc = 0; oc < out_ch_; ++oc) bias_->grad[oc] += gy_n.row(oc).sum();
    }
    return gx;
}

void Conv2d::collect(const std::string& prefix, ParamRefs& out) {
    weight_.name = prefix + ".weight";
    out.push_back(&weight_);
    if (bias_) {
        bias_->name = prefix + ".bias";
        out.push_back(bias_.get());
    }
}

void Conv2d::collect_state(const std::string& prefix, StateRefs& out) {
    out.push_back({prefix + ".weight", &weight_.value});
    if (bias_) out.push_back({prefix + ".bias", &bias_->value});
}

// ---------------------------------------------------------------------------
// BatchNorm2d / BatchNorm1d
// ---------------------------------------------------------------------------

BatchNorm2d::BatchNorm2d(int channels, double eps, double momentum)
    : channels_(channels),
      eps_(eps),
      momentum_(momentum),
      gamma_({channels}, false),
      beta_({channels}, false),
      running_mean_({channels}),
      running_var_({channels}) {
    gamma_.value.fill(1.0);
    running_var_.fill(1.0);
}

Tensor BatchNorm2d::forward(const Tensor& x, Mode mode) {
    if (x.ndim() != 4 || x.dim(1) != channels_)
        throw std::invalid_argument("BatchNorm2d: bad input " + x.shape_str());
    const int n = x.dim(0), h = x.dim(2), w = x.dim(3);
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;
    const std::int64_t count = static_cast<std::int64_t>(n) * hw;
    x_shape_ = x.shape;
    batch_stats_ = mode != Mode::kEval;

    Tensor y(x.shape);
    Tensor mean({channels_}), var({channels_});
    if (batch_stats_) {
        for (int c = 0; c < channels_; ++c) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const double* src = x.ptr() + (static_cast<std::int64_t>(i) * channels_ + c) * hw;
                for (std::int64_t k = 0; k < hw; ++k) s += src[k];
            }
            mean[c] = s / static_cast<double>(count);
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
                const double* src = x.ptr() + (static_cast<std::int64_t>(i) * channels_ + c) * hw;
                for (std::int64_t k = 0; k < hw; ++k) {
                    const double d = src[k] - mean[c];
                    v += d * d;
                }
            }
            var[c] = v / static_cast<double>(count);
        }
        if (mode == Mode::kTrain) {
            for (int c = 0; c < channels_; ++c) {
                running_mean_[c] = (1.0 - momentum_) * running_mean_[c] + momentum_ * mean[c];
                running_var_[c] = (1.0 - momentum_) * running_var_[c] + momentum_ * var[c];
            }
        }
    } else {
        mean = running_mean_;
        var = running_var_;
    }

    xhat_ = Tensor(x.shape);
    inv_std_ = Tensor({channels_});
    for (int c = 0; c < channels_; ++c) inv_std_[c] = 1.0 / std::sqrt(var[c] + eps_);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < channels_; ++c) {
            const std::int64_t base = (static_cast<std::int64_t>(i) * channels_ + c) * hw;
            const double m = mean[c], is = inv_std_[c], g = gamma_.value[c], b = beta_.value[c];
            for (std::int64_t k = 0; k < hw; ++k) {
                const double xh = (x.ptr()[base + k] - m) * is;
                xhat_.ptr()[base + k] = xh;
                y.ptr()[base + k] = g * xh + b;
            }
        }
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& gy) {
    const int n = x_shape_[0], h = x_shape_[2], w = x_shape_[3];
    const std::int64_t hw = static_cast<std::int64_t>(h) * w;
    const double count = static_cast<double>(static_cast<std::int64_t>(n) * hw);
    Tensor gx(x_shape_);

    for (int c = 0; c < channels_; ++c) {
        double sum_gy = 0.0, sum_gy_xhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::int64_t base = (static_cast<std::int64_t>(i) * channels_ + c) * hw;
            for (std::int64_t k = 0; k < hw; ++k) {
                sum_gy += gy.ptr()[base + k];
                sum_gy_xhat += gy.ptr()[base + k] * xhat_.ptr()[base + k];
            }
        }
        gamma_.grad[c] += sum_gy_xhat;
        beta_.grad[c] += sum_gy;

        const double g_is = gamma_.value[c] * inv_std_[c];
        for (int i = 0; i < n; ++i) {
            const std::int64_t base = (static_cast<std::int64_t>(i) * channels_ + c) * hw;
            for (std::int64_t k = 0; k < hw; ++k) {
                if (batch_stats_) {
                    gx.ptr()[base + k] =
                        g_is * (gy.ptr()[base + k] -
                                (sum_gy + xhat_.ptr()[base + k] * sum_gy_xhat) / count);
                } else {
                    gx.ptr()[base + k] = g_is * gy.ptr()[base + k];
                }
            }
        }
    }
    return gx;
}

void BatchNorm2d::collect(const std::string& prefix, ParamRefs& out) {
    gamma_.name = prefix + ".gamma";
    beta_.name = prefix + ".beta";
    out.push_back(&gamma_);
    out.push_back(&beta_);
}

void BatchNorm2d::collect_state(const std::string& prefix, StateRefs& out) {
    out.push_back({prefix + ".gamma", &gamma_.value});
    out.push_back({prefix + ".beta", &beta_.value});
    out.push_back({prefix + ".running_mean", &running_mean_});
    out.push_back({prefix + ".running_var", &running_var_});
}

BatchNorm1d::BatchNorm1d(int dim, double eps, double momentum)
    : dim_(dim),
      eps_(eps),
      momentum_(momentum),
      gamma_({dim}, false),
      beta_({dim}, false),
      running_mean_({dim}),
      running_var_({dim}) {
    gamma_.value.fill(1.0);
    running_var_.fill(1.0);
}

Tensor BatchNorm1d::forward(const Tensor& x, Mode mode) {
    if (x.ndim() != 2 || x.dim(1) != dim_)
        throw std::invalid_argument("BatchNorm1d: bad input " + x.shape_str());
    const int n = x.dim(0);
    x_shape_ = x.shape;
    batch_stats_ = mode != Mode::kEval;

    Tensor mean({dim_}), var({dim_});
    if (batch_stats_) {
        for (int j = 0; j < dim_; ++j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += x.ptr()[static_cast<std::int64_t>(i) * dim_ + j];
            mean[j] = s / n;
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = x.ptr()[static_cast<std::int64_t>(i) * dim_ + j] - mean[j];
                v += d * d;
            }
            var[j] = v / n;
        }
        if (mode == Mode::kTrain) {
            for (int j = 0; j < dim_; ++j) {
                running_mean_[j] = (1.0 - momentum_) * running_mean_[j] + momentum_ * mean[j];
                running_var_[j] = (1.0 - momentum_) * running_var_[j] + momentum_ * var[j];
            }
        }
    } else {
        mean = running_mean_;
        var = running_var_;
    }

    xhat_ = Tensor(x.shape);
    inv_std_ = Tensor({dim_});
    Tensor y(x.shape);
    for (int j = 0; j < dim_; ++j) inv_std_[j] = 1.0 / std::sqrt(var[j] + eps_);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < dim_; ++j) {
            const std::int64_t idx = static_cast<std::int64_t>(i) * dim_ + j;
            const double xh = (x.ptr()[idx] - mean[j]) * inv_std_[j];
            xhat_.ptr()[idx] = xh;
            y.ptr()[idx] = gamma_.value[j] * xh + beta_.value[j];
        }
    return y;
}

Tensor BatchNorm1d::backward(const Tensor& gy) {
    const int n = x_shape_[0];
    Tensor gx(x_shape_);
    for (int j = 0; j < dim_; ++j) {
        double sum_gy = 0.0, sum_gy_xhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const std::int64_t idx = static_cast<std::int64_t>(i) * dim_ + j;
            sum_gy += gy.ptr()[idx];
            sum_gy_xhat += gy.ptr()[idx] * xhat_.ptr()[idx];
        }
        gamma_.grad[j] += sum_gy_xhat;
        beta_.grad[j] += sum_gy;
        const double g_is = gamma_.value[j] * inv_std_[j];
        for (int i = 0; i < n; ++i) {
            const std::int64_t idx = static_cast<std::int64_t>(i) * dim_ + j;
            if (batch_stats_) {
                gx.ptr()[idx] = g_is * (gy.ptr()[idx] -
                                        (sum_gy + xhat_.ptr()[idx] * sum_gy_xhat) / n);
            } else {
                gx.ptr()[idx] = g_is * gy.ptr()[idx];
            }
        }
    }
    return gx;
}

void BatchNorm1d::collect(const std::string& prefix, ParamRefs& out) {
    gamma_.name = prefix + ".gamma";
    beta_.name = prefix + ".beta";
    out.push_back(&gamma_);
    out.push_back(&beta_);
}

void BatchNorm1d::collect_state(const std::string& prefix, StateRefs& out) {
    out.push_back({prefix + ".gamma", &gamma_.value});
    out.push_back({prefix + ".beta", &beta_.value});
    out.push_back({prefix + ".running_mean", &running_mean_});
    out.push_back({prefix + ".running_var", &running_var_});
}

// ---------------------------------------------------------------------------
// ReLU / Linear
// ---------------------------------------------------------------------------

Tensor ReLU::forward(const Tensor& x) {
    Tensor y(x.shape);
    mask_.assign(x.data.size(), 0);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        if (x.data[i] > 0.0) {
            y.data[i] = x.data[i];
            mask_[i] = 1;
        }
    }
    return y;
}

Tensor ReLU::backward(const Tensor& gy) const {
    Tensor gx(gy.shape);
    for (std::size_t i = 0; i < gy.data.size(); ++i)
        if (mask_[i]) gx.data[i] = gy.data[i];
    return gx;
}

Linear::Linear(int in_dim, int out_dim, bool bias, Rng& rng)
    : in_dim_(in_dim), out_dim_(out_dim), weight_({out_dim, in_dim}) {
    init_uniform(weight_.value, kaiming_bound(in_dim), rng);
    if (bias) {
        bias_ = std::make_unique<Param>(std::vector<int>{out_dim}, false);
        init_uniform(bias_->value, kaiming_bound(in_dim), rng);
    }
}

Tensor Linear::forward(const Tensor& x) {
    if (x.ndim() != 2 || x.dim(1) != in_dim_)
        throw std::invalid_argument("Linear: bad input " + x.shape_str());
    x_cache_ = x;
    const int n = x.dim(0);
    Tensor y({n, out_dim_});
    CMapMat xm(x.ptr(), n, in_dim_);
    CMapMat wm(weight_.value.ptr(), out_dim_, in_dim_);
    MapMat ym(y.ptr(), n, out_dim_);
    ym.noalias() = xm * wm.transpose();
    if (bias_)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < out_dim_; ++j) y.ptr()[static_cast<std::int64_t>(i) * out_dim_ + j] += bias_->value[j];
    return y;
}

Tensor Linear::backward(const Tensor& gy) {
    const int n = x_cache_.dim(0);
    Tensor gx({n, in_dim_});
    CMapMat gym(gy.ptr(), n, out_dim_);
    CMapMat xm(x_cache_.ptr(), n, in_dim_);
    CMapMat wm(weight_.value.ptr(), out_dim_, in_dim_);
    MapMat gwm(weight_.grad.ptr(), out_dim_, in_dim_);
    MapMat gxm(gx.ptr(), n, in_dim_);
    gwm.noalias() += gym.transpose() * xm;
    gxm.noalias() = gym * wm;
    if (bias_)
        for (int j = 0; j < out_dim_; ++j) bias_->grad[j] += gym.col(j).sum();
    return gx;
}

void Linear::collect(const std::string& prefix, ParamRefs& out) {
    weight_.name = prefix + ".weight";
    out.push_back(&weight_);
    if (bias_) {
        bias_->name = prefix + ".bias";
        out.push_back(bias_.get());
    }
}

void Linear::collect_state(const std::string& prefix, StateRefs& out) {
    out.push_back({prefix + ".weight", &weight_.value});
    if (bias_) out.push_back({prefix + ".bias", &bias_->value});
}

// ---------------------------------------------------------------------------
// Stateless ops
// ---------------------------------------------------------------------------

Tensor global_avg_pool(const Tensor& x) {
    const int n = x.dim(0), c = x.dim(1);
    const std::int64_t hw = static_cast<std::int64_t>(x.dim(2)) * x.dim(3);
    Tensor y({n, c});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) {
            const double* src = x.ptr() + (static_cast<std::int64_t>(i) * c + j) * hw;
            double s = 0.0;
            for (std::int64_t k = 0; k < hw; ++k) s += src[k];
            y.ptr()[static_cast<std::int64_t>(i) * c + j] = s / static_cast<double>(hw);
        }
    return y;
}

Tensor global_avg_pool_backward(const Tensor& gy, const std::vector<int>& x_shape) {
    const int n = x_shape[0], c = x_shape[1];
    const std::int64_t hw = static_cast<std::int64_t>(x_shape[2]) * x_shape[3];
    Tensor gx(x_shape);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) {
            const double g = gy.ptr()[static_cast<std::int64_t>(i) * c + j] / static_cast<double>(hw);
            double* dst = gx.ptr() + (static_cast<std::int64_t>(i) * c + j) * hw;
            for (std::int64_t k = 0; k < hw; ++k) dst[k] = g;
        }
    return gx;
}

struct BilinearTap {
    int y0, y1, x0, x1;
    double wy, wx;
};

static BilinearTap bilinear_tap(int oy, int ox, int in_h, int in_w, double sy, double sx) {
    BilinearTap t;
    const double fy = (oy + 0.5) * sy - 0.5;
    const double fx = (ox + 0.5) * sx - 0.5;
    const double fy_floor = std::floor(fy);
    const double fx_floor = std::floor(fx);
    t.wy = fy - fy_floor;
    t.wx = fx - fx_floor;
    const int iy = static_cast<int>(fy_floor);
    const int ix = static_cast<int>(fx_floor);
    t.y0 = std::clamp(iy, 0, in_h - 1);
    t.y1 = std::clamp(iy + 1, 0, in_h - 1);
    t.x0 = std::clamp(ix, 0, in_w - 1);
    t.x1 = std::clamp(ix + 1, 0, in_w - 1);
    return t;
}

Tensor resize_bilinear(const Tensor& x, int out_h, int out_w) {
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor y({n, c, out_h, out_w});
    const double sy = static_cast<double>(h) / out_h;
    const double sx = static_cast<double>(w) / out_w;
    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox) {
            const BilinearTap t = bilinear_tap(oy, ox, h, w, sy, sx);
            const double w00 = (1 - t.wy) * (1 - t.wx), w01 = (1 - t.wy) * t.wx;
            const double w10 = t.wy * (1 - t.wx), w11 = t.wy * t.wx;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < c; ++j) {
                    const double* src = x.ptr() + (static_cast<std::int64_t>(i) * c + j) * h * w;
                    y.ptr()[((static_cast<std::int64_t>(i) * c + j) * out_h + oy) * out_w + ox] =
                        w00 * src[t.y0 * w + t.x0] + w01 * src[t.y0 * w + t.x1] +
                        w10 * src[t.y1 * w + t.x0] + w11 * src[t.y1 * w + t.x1];
                }
        }
    return y;
}

Tensor resize_bilinear_backward(const Tensor& gy, const std::vector<int>& x_shape) {
    const int n = x_shape[0], c = x_shape[1], h = x_shape[2], w = x_shape[3];
    const int out_h = gy.dim(2), out_w = gy.dim(3);
    Tensor gx(x_shape);
    const double sy = static_cast<double>(h) / out_h;
    const double sx = static_cast<double>(w) / out_w;
    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox) {
            const BilinearTap t = bilinear_tap(oy, ox, h, w, sy, sx);
            const double w00 = (1 - t.wy) * (1 - t.wx), w01 = (1 - t.wy) * t.wx;
            const double w10 = t.wy * (1 - t.wx), w11 = t.wy * t.wx;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < c; ++j) {
                    double* dst = gx.ptr() + (static_cast<std::int64_t>(i) * c + j) * h * w;
                    const double g =
                        gy.ptr()[((static_cast<std::int64_t>(i) * c + j) * out_h + oy) * out_w + ox];
                    dst[t.y0 * w + t.x0] += w00 * g;
                    dst[t.y0 * w + t.x1] += w01 * g;
                    dst[t.y1 * w + t.x0] += w10 * g;
                    dst[t.y1 * w + t.x1] += w11 * g;
                }
        }
    return gx;
}

Tensor l2_normalize_rows(const Tensor& x, bool allow_zero, double zero_eps) {
    const int n = x.dim(0), d = x.dim(1);
    Tensor y(x.shape);
    for (int i = 0; i < n; ++i) {
        const double* src = x.ptr() + static_cast<std::int64_t>(i) * d;
        double norm2 = 0.0;
        for (int j = 0; j < d; ++j) norm2 += src[j] * src[j];
        const double norm = std::sqrt(norm2);
        if (norm < zero_eps) {
            if (!allow_zero)
                throw std::runtime_error("l2_normalize_rows: zero-norm row " + std::to_string(i));
            continue;  // leave row zero
        }
        double* dst = y.ptr() + static_cast<std::int64_t>(i) * d;
        for (int j = 0; j < d; ++j) dst[j] = src[j] / norm;
    }
    return y;
}

Tensor l2_normalize_rows_backward(const Tensor& gy, const Tensor& x, const Tensor& y,
                                  double zero_eps) {
    const int n = x.dim(0), d = x.dim(1);
    Tensor gx(x.shape);
    for (int i = 0; i < n; ++i) {
        const double* xs = x.ptr() + static_cast<std::int64_t>(i) * d;
        const double* ys = y.ptr() + static_cast<std::int64_t>(i) * d;
        const double* gs = gy.ptr() + static_cast<std::int64_t>(i) * d;
        double norm2 = 0.0, dot = 0.0;
        for (int j = 0; j < d; ++j) norm2 += xs[j] * xs[j];
        const double norm = std::sqrt(norm2);
        if (norm < zero_eps) continue;  // matched forward: zero row stayed zero
        for (int j = 0; j < d; ++j) dot += gs[j] * ys[j];
        double* dst = gx.ptr() + static_cast<std::int64_t>(i) * d;
        for (int j = 0; j < d; ++j) dst[j] = (gs[j] - ys[j] * dot) / norm;
    }
    return gx;
}

Tensor softmax_rows(const Tensor& logits) {
    const int n = logits.dim(0), d = logits.dim(1);
    Tensor y(logits.shape);
    for (int i = 0; i < n; ++i) {
        const double* src = logits.ptr() + static_cast<std::int64_t>(i) * d;
        double* dst = y.ptr() + static_cast<std::int64_t>(i) * d;
        double mx = src[0];
        for (int j = 1; j < d; ++j) mx = std::max(mx, src[j]);
        double sum = 0.0;
        for (int j = 0; j < d; ++j) {
            dst[j] = std::exp(src[j] - mx);
            sum += dst[j];
        }
        for (int j = 0; j < d; ++j) dst[j] /= sum;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Sgd
// ---------------------------------------------------------------------------

void Sgd::step(const ParamRefs& params, double lr) {
    for (Param* p : params) {
        auto it = velocity_.find(p);
        if (it == velocity_.end()) it = velocity_.emplace(p, Tensor(p->value.shape)).first;
        Tensor& v = it->second;
        for (std::size_t i = 0; i < p->value.data.size(); ++i) {
            double g = p->grad.data[i];
            if (p->decay) g += weight_decay_ * p->value.data[i];
            v.data[i] = momentum_ * v.data[i] + g;
            p->value.data[i] -= lr * v.data[i];
        }
    }
}

void Sgd::zero_grad(const ParamRefs& params) {
    for (Param* p : params) p->grad.zero();
}

}  // namespace lmk::nn
