#ifndef LMK_NN_HPP
#define LMK_NN_HPP

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lmk/tensor.hpp"

namespace lmk::nn {

/// Trainable tensor plus its gradient accumulator.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;
    bool decay = true;  // weight decay applies (off for biases and norm scales)

    explicit Param(std::vector<int> shape, bool decay_ = true)
        : value(shape), grad(std::move(shape)), decay(decay_) {}
};

using ParamRefs = std::vector<Param*>;

/// Named view of every tensor that defines a module's state: trainable params
/// plus non-trainable buffers (batch-norm running stats). Used by checkpoints
/// and momentum averaging, where ordering must be stable.
struct StateRef {
    std::string name;
    Tensor* value;
};
using StateRefs = std::vector<StateRef>;

/// Forward-pass mode. kTargetTrain normalizes with batch statistics like
/// kTrain but never updates running buffers; the momentum branch must change
/// only through explicit averaging.
enum class Mode { kTrain, kTargetTrain, kEval };

// ---------------------------------------------------------------------------
// Layers. Each caches what backward() needs during forward(); backward()
// accumulates parameter gradients and returns the input gradient.
// ---------------------------------------------------------------------------

class Conv2d {
public:
    Conv2d(int in_ch, int out_ch, int kernel, int stride, int pad, bool bias, Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& gy);

    void collect(const std::string& prefix, ParamRefs& out);
    void collect_state(const std::string& prefix, StateRefs& out);

    int in_ch() const { return in_ch_; }
    int out_ch() const { return out_ch_; }

private:
    int in_ch_, out_ch_, kernel_, stride_, pad_;
    bool has_bias_;
    Param weight_;  // (out, in*k*k)
    std::unique_ptr<Param> bias_;
    // cached forward context
    Tensor cols_;  // (N, in*k*k, Ho*Wo)
    std::vector<int> x_shape_;
    int out_h_ = 0, out_w_ = 0;
};

class BatchNorm2d {
public:
    explicit BatchNorm2d(int channels, double eps = 1e-5, double momentum = 0.1);

    Tensor forward(const Tensor& x, Mode mode);
    Tensor backward(const Tensor& gy);

    void collect(const std::string& prefix, ParamRefs& out);
    void collect_state(const std::string& prefix, StateRefs& out);

private:
    int channels_;
    double eps_, momentum_;
    Param gamma_, beta_;
    Tensor running_mean_, running_var_;
    // cached forward context (batch-stat modes only)
    Tensor xhat_, inv_std_;
    std::vector<int> x_shape_;
    bool batch_stats_ = false;
};

/// Batch norm over (N, D) activations.
class BatchNorm1d {
public:
    explicit BatchNorm1d(int dim, double eps = 1e-5, double momentum = 0.1);

    Tensor forward(const Tensor& x, Mode mode);
    Tensor backward(const Tensor& gy);

    void collect(const std::string& prefix, ParamRefs& out);
    void collect_state(const std::string& prefix, StateRefs& out);

private:
    int dim_;
    double eps_, momentum_;
    Param gamma_, beta_;
    Tensor running_mean_, running_var_;
    Tensor xhat_, inv_std_;
    std::vector<int> x_shape_;
    bool batch_stats_ = false;
};

class ReLU {
public:
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& gy) const;

private:
    std::vector<unsigned char> mask_;
};

class Linear {
public:
    Linear(int in_dim, int out_dim, bool bias, Rng& rng);

    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& gy);

    void collect(const std::string& prefix, ParamRefs& out);
    void collect_state(const std::string& prefix, StateRefs& out);

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }

private:
    int in_dim_, out_dim_;
    Param weight_;  // (out, in)
    std::unique_ptr<Param> bias_;
    Tensor x_cache_;
};

// ---------------------------------------------------------------------------
// Stateless ops with explicit backward companions.
// ---------------------------------------------------------------------------

/// (N, C, H, W) -> (N, C); mean over the spatial grid.
Tensor global_avg_pool(const Tensor& x);
Tensor global_avg_pool_backward(const Tensor& gy, const std::vector<int>& x_shape);

/// Bilinear resize of (N, C, H, W) to (out_h, out_w), half-pixel convention.
Tensor resize_bilinear(const Tensor& x, int out_h, int out_w);
Tensor resize_bilinear_backward(const Tensor& gy, const std::vector<int>& x_shape);

/// Row-wise L2 normalization of a (N, D) matrix. Rows with norm below
/// `zero_eps` are left as zeros when `allow_zero`, otherwise it throws.
Tensor l2_normalize_rows(const Tensor& x, bool allow_zero = false, double zero_eps = 1e-30);
Tensor l2_normalize_rows_backward(const Tensor& gy, const Tensor& x, const Tensor& y,
                                  double zero_eps = 1e-30);

/// Row-wise softmax with max subtraction.
Tensor softmax_rows(const Tensor& logits);

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

/// SGD with classical momentum and decoupled-from-schedule weight decay
/// (decay added to the raw gradient for params with decay=true).
class Sgd {
public:
    Sgd(double momentum, double weight_decay) : momentum_(momentum), weight_decay_(weight_decay) {}

    void step(const ParamRefs& params, double lr);
    static void zero_grad(const ParamRefs& params);

private:
    double momentum_, weight_decay_;
    std::unordered_map<Param*, Tensor> velocity_;
};

/// Kaiming-uniform fan-in initialization bound.
double kaiming_bound(int fan_in);

}  // namespace lmk::nn

#endif  // LMK_NN_HPP
