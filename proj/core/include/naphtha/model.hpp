#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "naphtha/hash.hpp"
#include "naphtha/layers.hpp"
#include "naphtha/optimizer.hpp"
#include "naphtha/simulator.hpp"
#include "naphtha/tensor.hpp"

namespace naphtha {

// Three-network assembly: a shared convolutional feature extractor feeding a
// composition head and a Watson-K head. Parameter groups are "f", "e", "w".
struct ModelConfig {
    std::size_t curve_points = 30;
    std::size_t n_components = 25;
    std::size_t channels = 16;
    std::size_t residual_blocks = 2;
    std::size_t feature_dim = 64;
    std::size_t composition_hidden = 64;
    std::size_t watson_hidden = 32;
    // Fixed affine input scaling (Kelvin -> dimensionless); part of the
    // architecture so checkpoints stay self-contained.
    double input_center_k = 370.0;
    double input_scale_k = 100.0;
};

class Model {
public:
    explicit Model(ModelConfig cfg = {});

    Model(const Model&) = delete;
    Model& operator=(const Model&) = delete;

    // He-style uniform init, U(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases zero,
    // parameters visited in registration order. Deterministic per seed.
    void init_params(std::uint64_t seed);

    // Composition path e(f(x)): (B,1,L) -> (B,25) raw wt%-scale output.
    // The head is linear; nothing constrains sign or sum.
    Tensor forward_composition(const Tensor& curves);
    void backward_composition(const Tensor& grad_out); // fills groups f, e

    // Watson path w(f(x)): (B,1,L) -> (B,1).
    Tensor forward_watson(const Tensor& curves);
    void backward_watson(const Tensor& grad_out); // fills groups f, w

    // Single-curve conveniences.
    std::vector<double> predict_composition(const DistillationCurve& curve);
    // Post-processing for downstream consumers: clamp at 0, renormalize to 100.
    std::vector<double> predict_composition_normalized(const DistillationCurve& curve);
    double predict_watson_k(const DistillationCurve& curve);

    // Batch assembly: raw Kelvin temperatures, shape (B, 1, curve_points).
    Tensor batch_from_curves(const std::vector<const DistillationCurve*>& curves) const;

    const ModelConfig& config() const { return cfg_; }
    ParamStore& params() { return store_; }
    const ParamStore& params() const { return store_; }

    // Canonical architecture description; its SHA-256 is the checkpoint
    // fingerprint.
    std::string architecture_text() const;
    Sha256Digest fingerprint() const;

private:
    Tensor scale_input(const Tensor& curves) const;
    Tensor run_extractor(const Tensor& scaled);
    Tensor backward_extractor(const Tensor& grad);

    ModelConfig cfg_;
    ParamStore store_;

    Conv1d stem_;
    ReLU stem_relu_;
    std::vector<std::unique_ptr<ResidualBlock>> blocks_;
    Flatten flatten_;
    Dense feature_fc_;
    ReLU feature_relu_;

    Dense comp_hidden_;
    ReLU comp_relu_;
    Dense comp_out_;

    Dense watson_hidden_;
    ReLU watson_relu_;
    Dense watson_out_;
};

} // namespace naphtha
