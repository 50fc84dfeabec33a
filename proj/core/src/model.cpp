#include "naphtha/model.hpp"

#include <cmath>
#include <sstream>

#include "naphtha/error.hpp"
#include "naphtha/properties.hpp"
#include "naphtha/rng.hpp"

namespace naphtha {

Model::Model(ModelConfig cfg)
    : cfg_(cfg),
      stem_(store_, "f", "stem", 1, cfg.channels),
      blocks_([&] {
          // Members initialize in declaration order, so parameters register
          // in data-flow order: stem, blocks, feature, then the heads.
          std::vector<std::unique_ptr<ResidualBlock>> v;
          for (std::size_t b = 0; b < cfg.residual_blocks; ++b)
              v.push_back(std::make_unique<ResidualBlock>(store_, "f", "block" + std::to_string(b + 1), cfg.channels));
          return v;
      }()),
      feature_fc_(store_, "f", "feature", cfg.channels * cfg.curve_points, cfg.feature_dim),
      comp_hidden_(store_, "e", "hidden", cfg.feature_dim, cfg.composition_hidden),
      comp_out_(store_, "e", "out", cfg.composition_hidden, cfg.n_components),
      watson_hidden_(store_, "w", "hidden", cfg.feature_dim, cfg.watson_hidden),
      watson_out_(store_, "w", "out", cfg.watson_hidden, 1) {}

void Model::init_params(std::uint64_t seed) {
    Rng rng = Rng::substream(seed, 0x6d6f64656cULL);
    store_.for_each_param([&](const std::string&, ParamTensor& p) {
        const bool is_bias = p.value.rank() == 1;
        if (is_bias) {
            p.value.fill(0.0);
        } else {
            std::size_t fan_in = 1;
            for (std::size_t d = 1; d < p.value.rank(); ++d) fan_in *= p.value.dim(d);
            const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
            for (auto& v : p.value.data) v = rng.uniform(-limit, limit);
        }
        p.grad.fill(0.0);
        p.adam_m.fill(0.0);
        p.adam_v.fill(0.0);
    });
    for (auto& name : store_.group_names()) {
        store_.group(name).step = 0;
        store_.group(name).grad_ready = false;
    }
}

Tensor Model::scale_input(const Tensor& curves) const {
    if (curves.rank() != 3 || curves.dim(1) != 1 || curves.dim(2) != cfg_.curve_points)
        raise(ErrorCode::ShapeMismatch,
              "model input must be (B,1," + std::to_string(cfg_.curve_points) + "), got " + curves.shape_string());
    require_finite(curves, "model input");
    Tensor scaled = curves;
    for (auto& v : scaled.data) v = (v - cfg_.input_center_k) / cfg_.input_scale_k;
    return scaled;
}

Tensor Model::run_extractor(const Tensor& scaled) {
    Tensor h = stem_relu_.forward(stem_.forward(scaled));
    for (auto& block : blocks_) h = block->forward(h);
    return feature_relu_.forward(feature_fc_.forward(flatten_.forward(h)));
}

Tensor Model::backward_extractor(const Tensor& grad) {
    Tensor g = flatten_.backward(feature_fc_.backward(feature_relu_.backward(grad)));
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it) g = (*it)->backward(g);
    return stem_.backward(stem_relu_.backward(g));
}

Tensor Model::forward_composition(const Tensor& curves) {
    Tensor features = run_extractor(scale_input(curves));
    Tensor out = comp_out_.forward(comp_relu_.forward(comp_hidden_.forward(features)));
    require_finite(out, "composition head");
    return out;
}

void Model::backward_composition(const Tensor& grad_out) {
    Tensor g = comp_hidden_.backward(comp_relu_.backward(comp_out_.backward(grad_out)));
    backward_extractor(g);
    store_.mark_gradients_ready("f");
    store_.mark_gradients_ready("e");
}

Tensor Model::forward_watson(const Tensor& curves) {
    Tensor features = run_extractor(scale_input(curves));
    Tensor out = watson_out_.forward(watson_relu_.forward(watson_hidden_.forward(features)));
    require_finite(out, "watson head");
    return out;
}

void Model::backward_watson(const Tensor& grad_out) {
    Tensor g = watson_hidden_.backward(watson_relu_.backward(watson_out_.backward(grad_out)));
    backward_extractor(g);
    store_.mark_gradients_ready("f");
    store_.mark_gradients_ready("w");
}

Tensor Model::batch_from_curves(const std::vector<const DistillationCurve*>& curves) const {
    if (curves.empty()) raise(ErrorCode::ShapeMismatch, "empty batch");
    Tensor x({curves.size(), 1, cfg_.curve_points});
    for (std::size_t b = 0; b < curves.size(); ++b) {
        if (curves[b]->size() != cfg_.curve_points)
            raise(ErrorCode::ShapeMismatch, "curve length " + std::to_string(curves[b]->size()) + ", expected " +
                                                std::to_string(cfg_.curve_points));
        for (std::size_t l = 0; l < cfg_.curve_points; ++l) x.at(b, 0, l) = curves[b]->temperatures_k[l];
    }
    return x;
}

std::vector<double> Model::predict_composition(const DistillationCurve& curve) {
    Tensor out = forward_composition(batch_from_curves({&curve}));
    return {out.data.begin(), out.data.end()};
}

std::vector<double> Model::predict_composition_normalized(const DistillationCurve& curve) {
    std::vector<double> raw = predict_composition(curve);
    for (auto& v : raw) v = v > 0.0 ? v : 0.0;
    return normalize(raw).wt_pct;
}

double Model::predict_watson_k(const DistillationCurve& curve) {
    Tensor out = forward_watson(batch_from_curves({&curve}));
    return out[0];
}

std::string Model::architecture_text() const {
    std::ostringstream os;
    os << "input(1x" << cfg_.curve_points << ");affine(center=" << cfg_.input_center_k
       << ",scale=" << cfg_.input_scale_k << ")|";
    os << "f:conv1d(1->" << cfg_.channels << ",k3);relu";
    for (std::size_t b = 0; b < cfg_.residual_blocks; ++b)
        os << ";resblock(" << cfg_.channels << ",k3)";
    os << ";flatten(" << cfg_.channels * cfg_.curve_points << ");dense(" << cfg_.channels * cfg_.curve_points << "->"
       << cfg_.feature_dim << ");relu";
    os << "|e:dense(" << cfg_.feature_dim << "->" << cfg_.composition_hidden << ");relu;dense("
       << cfg_.composition_hidden << "->" << cfg_.n_components << ")";
    os << "|w:dense(" << cfg_.feature_dim << "->" << cfg_.watson_hidden << ");relu;dense(" << cfg_.watson_hidden
       << "->1)";
    return os.str();
}

Sha256Digest Model::fingerprint() const {
    return sha256(architecture_text());
}

} // namespace naphtha
