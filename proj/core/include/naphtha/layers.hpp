#pragma once

#include <string>

#include "naphtha/optimizer.hpp"
#include "naphtha/tensor.hpp"

namespace naphtha {

// Hand-written forward/backward layers over a static graph. Each forward
// caches what its backward needs; a backward must follow its own forward.
// backward() accumulates parameter gradients into the store and returns the
// gradient with respect to the layer input.

class Dense {
public:
    Dense(ParamStore& store, const std::string& group, const std::string& name, std::size_t in_features,
          std::size_t out_features);

    Tensor forward(const Tensor& in); // (B, in) -> (B, out)
    Tensor backward(const Tensor& grad_out);

    std::size_t in_features() const { return in_; }
    std::size_t out_features() const { return out_; }
    ParamTensor& weight() { return *weight_; }
    ParamTensor& bias() { return *bias_; }

private:
    std::size_t in_, out_;
    ParamTensor* weight_; // (out, in)
    ParamTensor* bias_;   // (out)
    Tensor input_;
};

// 1D convolution, stride 1, zero 'same' padding, kernel size 3 by default.
class Conv1d {
public:
    Conv1d(ParamStore& store, const std::string& group, const std::string& name, std::size_t in_channels,
           std::size_t out_channels, std::size_t kernel = 3);

    Tensor forward(const Tensor& in); // (B, Cin, L) -> (B, Cout, L)
    Tensor backward(const Tensor& grad_out);

    ParamTensor& weight() { return *weight_; }
    ParamTensor& bias() { return *bias_; }

private:
    std::size_t cin_, cout_, kernel_;
    ParamTensor* weight_; // (Cout, Cin, K)
    ParamTensor* bias_;   // (Cout)
    Tensor input_;
};

class ReLU {
public:
    Tensor forward(const Tensor& in);
    Tensor backward(const Tensor& grad_out);

private:
    Tensor input_;
};

// (B, C, L) <-> (B, C*L)
class Flatten {
public:
    Tensor forward(const Tensor& in);
    Tensor backward(const Tensor& grad_out);

private:
    std::vector<std::size_t> in_shape_;
};

// Elementwise skip-connection sum; backward routes the gradient to both branches.
Tensor residual_add(const Tensor& a, const Tensor& b);

// conv -> relu -> conv -> (+input) -> relu, all width-preserving.
class ResidualBlock {
public:
    ResidualBlock(ParamStore& store, const std::string& group, const std::string& name, std::size_t channels,
                  std::size_t kernel = 3);

    Tensor forward(const Tensor& in);
    Tensor backward(const Tensor& grad_out);

private:
    Conv1d conv1_;
    Conv1d conv2_;
    ReLU relu_mid_;
    Tensor input_;
    Tensor pre_activation_;
};

struct LossValue {
    double value = 0.0;
    Tensor grad; // d loss / d pred
};

// Mean over the batch of the squared L2 norm per sample.
// grad = 2 (pred - target) / batch.
LossValue mse_loss(const Tensor& pred, const Tensor& target);

} // namespace naphtha
