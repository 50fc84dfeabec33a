#include "naphtha/layers.hpp"

#include <algorithm>

#include "naphtha/error.hpp"

namespace naphtha {

Dense::Dense(ParamStore& store, const std::string& group, const std::string& name, std::size_t in_features,
             std::size_t out_features)
    : in_(in_features), out_(out_features) {
    weight_ = &store.add(group, name + ".weight", {out_features, in_features});
    bias_ = &store.add(group, name + ".bias", {out_features});
}

Tensor Dense::forward(const Tensor& in) {
    if (in.rank() != 2 || in.dim(1) != in_)
        raise(ErrorCode::ShapeMismatch, "dense: expected (B," + std::to_string(in_) + "), got " + in.shape_string());
    input_ = in;
    const std::size_t batch = in.dim(0);
    Tensor out({batch, out_});
    const double* w = weight_->value.data.data();
    for (std::size_t b = 0; b < batch; ++b) {
        const double* x = in.data.data() + b * in_;
        double* y = out.data.data() + b * out_;
        for (std::size_t o = 0; o < out_; ++o) {
            const double* wo = w + o * in_;
            double acc = bias_->value[o];
            for (std::size_t i = 0; i < in_; ++i) acc += wo[i] * x[i];
            y[o] = acc;
        }
    }
    require_finite(out, "dense forward");
    return out;
}

Tensor Dense::backward(const Tensor& grad_out) {
    if (grad_out.rank() != 2 || grad_out.dim(1) != out_ || grad_out.dim(0) != input_.dim(0))
        raise(ErrorCode::ShapeMismatch, "dense backward: bad gradient shape " + grad_out.shape_string());
    const std::size_t batch = grad_out.dim(0);
    Tensor grad_in({batch, in_});
    double* dw = weight_->grad.data.data();
    const double* w = weight_->value.data.data();
    for (std::size_t b = 0; b < batch; ++b) {
        const double* dy = grad_out.data.data() + b * out_;
        const double* x = input_.data.data() + b * in_;
        double* dx = grad_in.data.data() + b * in_;
        for (std::size_t o = 0; o < out_; ++o) {
            const double g = dy[o];
            bias_->grad[o] += g;
            double* dwo = dw + o * in_;
            const double* wo = w + o * in_;
            for (std::size_t i = 0; i < in_; ++i) {
                dwo[i] += g * x[i];
                dx[i] += g * wo[i];
            }
        }
    }
    return grad_in;
}

Conv1d::Conv1d(ParamStore& store, const std::string& group, const std::string& name, std::size_t in_channels,
               std::size_t out_channels, std::size_t kernel)
    : cin_(in_channels), cout_(out_channels), kernel_(kernel) {
    if (kernel % 2 == 0) raise(ErrorCode::ShapeMismatch, "conv1d kernel must be odd for same padding");
    weight_ = &store.add(group, name + ".weight", {out_channels, in_channels, kernel});
    bias_ = &store.add(group, name + ".bias", {out_channels});
}

Tensor Conv1d::forward(const Tensor& in) {
    if (in.rank() != 3 || in.dim(1) != cin_)
        raise(ErrorCode::ShapeMismatch, "conv1d: expected (B," + std::to_string(cin_) + ",L), got " + in.shape_string());
    input_ = in;
    const std::size_t batch = in.dim(0);
    const std::size_t len = in.dim(2);
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(kernel_ / 2);
    Tensor out({batch, cout_, len});
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t co = 0; co < cout_; ++co) {
            double* y = &out.at(b, co, 0);
            for (std::size_t l = 0; l < len; ++l) y[l] = bias_->value[co];
            for (std::size_t ci = 0; ci < cin_; ++ci) {
                const double* x = &input_.at(b, ci, 0);
                const double* w = &weight_->value[(co * cin_ + ci) * kernel_];
                for (std::size_t t = 0; t < kernel_; ++t) {
                    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(t) - half;
                    const double wt = w[t];
                    const std::size_t lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -shift));
                    const std::size_t hi = static_cast<std::size_t>(
                        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len), static_cast<std::ptrdiff_t>(len) - shift));
                    for (std::size_t l = lo; l < hi; ++l)
                        y[l] += wt * x[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(l) + shift)];
                }
            }
        }
    }
    require_finite(out, "conv1d forward");
    return out;
}

Tensor Conv1d::backward(const Tensor& grad_out) {
    const std::size_t batch = input_.dim(0);
    const std::size_t len = input_.dim(2);
    if (grad_out.rank() != 3 || grad_out.dim(0) != batch || grad_out.dim(1) != cout_ || grad_out.dim(2) != len)
        raise(ErrorCode::ShapeMismatch, "conv1d backward: bad gradient shape " + grad_out.shape_string());
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(kernel_ / 2);
    Tensor grad_in({batch, cin_, len});
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t co = 0; co < cout_; ++co) {
            const double* dy = &grad_out.at(b, co, 0);
            for (std::size_t l = 0; l < len; ++l) bias_->grad[co] += dy[l];
            for (std::size_t ci = 0; ci < cin_; ++ci) {
                const double* x = &input_.at(b, ci, 0);
                double* dx = &grad_in.at(b, ci, 0);
                const double* w = &weight_->value[(co * cin_ + ci) * kernel_];
                double* dw = &weight_->grad[(co * cin_ + ci) * kernel_];
                for (std::size_t t = 0; t < kernel_; ++t) {
                    const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(t) - half;
                    const double wt = w[t];
                    double dwt = 0.0;
                    const std::size_t lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -shift));
                    const std::size_t hi = static_cast<std::size_t>(
                        std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(len), static_cast<std::ptrdiff_t>(len) - shift));
                    for (std::size_t l = lo; l < hi; ++l) {
                        const std::size_t src = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(l) + shift);
                        dwt += dy[l] * x[src];
                        dx[src] += dy[l] * wt;
                    }
                    dw[t] += dwt;
                }
            }
        }
    }
    return grad_in;
}

Tensor ReLU::forward(const Tensor& in) {
    input_ = in;
    Tensor out = in;
    for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor ReLU::backward(const Tensor& grad_out) {
    require_same_shape(grad_out, input_, "relu backward");
    Tensor grad_in = grad_out;
    for (std::size_t i = 0; i < grad_in.size(); ++i)
        if (input_[i] <= 0.0) grad_in[i] = 0.0;
    return grad_in;
}

Tensor Flatten::forward(const Tensor& in) {
    if (in.rank() != 3) raise(ErrorCode::ShapeMismatch, "flatten expects rank 3, got " + in.shape_string());
    in_shape_ = in.shape;
    Tensor out({in.dim(0), in.dim(1) * in.dim(2)});
    out.data = in.data;
    return out;
}

Tensor Flatten::backward(const Tensor& grad_out) {
    if (grad_out.rank() != 2 || grad_out.dim(0) != in_shape_[0] || grad_out.dim(1) != in_shape_[1] * in_shape_[2])
        raise(ErrorCode::ShapeMismatch, "flatten backward: bad gradient shape " + grad_out.shape_string());
    Tensor grad_in(in_shape_);
    grad_in.data = grad_out.data;
    return grad_in;
}

Tensor residual_add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "residual_add");
    Tensor out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

ResidualBlock::ResidualBlock(ParamStore& store, const std::string& group, const std::string& name,
                             std::size_t channels, std::size_t kernel)
    : conv1_(store, group, name + ".conv1", channels, channels, kernel),
      conv2_(store, group, name + ".conv2", channels, channels, kernel) {}

Tensor ResidualBlock::forward(const Tensor& in) {
    input_ = in;
    Tensor h = conv2_.forward(relu_mid_.forward(conv1_.forward(in)));
    pre_activation_ = residual_add(h, in);
    Tensor out = pre_activation_;
    for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor ResidualBlock::backward(const Tensor& grad_out) {
    require_same_shape(grad_out, pre_activation_, "residual block backward");
    Tensor d_pre = grad_out;
    for (std::size_t i = 0; i < d_pre.size(); ++i)
        if (pre_activation_[i] <= 0.0) d_pre[i] = 0.0;
    Tensor d_branch = conv1_.backward(relu_mid_.backward(conv2_.backward(d_pre)));
    // Skip connection adds the pre-activation gradient straight to the input.
    for (std::size_t i = 0; i < d_branch.size(); ++i) d_branch[i] += d_pre[i];
    return d_branch;
}

LossValue mse_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "mse_loss");
    if (pred.rank() < 2) raise(ErrorCode::ShapeMismatch, "mse_loss expects a batch dimension");
    const double batch = static_cast<double>(pred.dim(0));
    LossValue out;
    out.grad = Tensor(pred.shape);
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        acc += d * d;
        out.grad[i] = 2.0 * d / batch;
    }
    out.value = acc / batch;
    return out;
}

} // namespace naphtha
