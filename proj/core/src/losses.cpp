#include "naphtha/losses.hpp"

#include <cmath>
#include <string>

#include "naphtha/error.hpp"

namespace naphtha {

LossValue loss_comp(const Tensor& pred, const Tensor& truth) {
    return mse_loss(pred, truth);
}

LossValue loss_res(const Tensor& pred) {
    if (pred.rank() != 2) raise(ErrorCode::ShapeMismatch, "loss_res expects (B, n_c)");
    const std::size_t batch = pred.dim(0);
    const std::size_t nc = pred.dim(1);
    LossValue out;
    out.grad = Tensor(pred.shape);
    double acc = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        double sum = 0.0;
        for (std::size_t j = 0; j < nc; ++j) sum += pred.at(b, j);
        const double r = 100.0 - sum;
        acc += r * r;
        const double g = -2.0 * r / static_cast<double>(batch);
        for (std::size_t j = 0; j < nc; ++j) out.grad.at(b, j) = g;
    }
    out.value = acc / static_cast<double>(batch);
    return out;
}

LossValue loss_k(const Tensor& pred_k, std::span<const double> k_true) {
    if (pred_k.rank() != 2 || pred_k.dim(1) != 1 || pred_k.dim(0) != k_true.size())
        raise(ErrorCode::ShapeMismatch, "loss_k expects (B,1) predictions aligned with truth");
    Tensor target({k_true.size(), 1});
    for (std::size_t b = 0; b < k_true.size(); ++b) target.at(b, 0) = k_true[b];
    return mse_loss(pred_k, target);
}

double softplus_clamp(double x, double sharpness) {
    const double z = sharpness * x;
    // max(z,0) + log1p(exp(-|z|)), stable for large |z|.
    const double pos = z > 0.0 ? z : 0.0;
    return (pos + std::log1p(std::exp(-std::abs(z)))) / sharpness;
}

double softplus_clamp_derivative(double x, double sharpness) {
    const double z = sharpness * x;
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

SimLoss loss_sim(const Tensor& pred, std::span<const double> k_true, const ComponentLibrary& lib,
                 const SimulatorConfig& scfg, const WatsonKConfig& kcfg, double clamp_sharpness) {
    if (pred.rank() != 2 || pred.dim(1) != lib.size() || pred.dim(0) != k_true.size())
        raise(ErrorCode::ShapeMismatch, "loss_sim expects (B, n_c) predictions aligned with truth");
    if (!(clamp_sharpness > 0.0)) raise(ErrorCode::DegenerateConfig, "clamp sharpness must be positive");

    const std::size_t batch = pred.dim(0);
    const std::size_t nc = pred.dim(1);
    SimLoss out;
    out.grad = Tensor(pred.shape);
    out.k_sim.resize(batch);

    std::vector<double> clamped(nc);
    double acc = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t j = 0; j < nc; ++j) clamped[j] = softplus_clamp(pred.at(b, j), clamp_sharpness);
        SimulatedWatsonK sim = simulated_watson_k_raw(clamped, lib, scfg, kcfg);
        out.k_sim[b] = sim.k;
        const double err = sim.k - k_true[b];
        acc += err * err;
        const double scale = 2.0 * err / static_cast<double>(batch);
        for (std::size_t j = 0; j < nc; ++j)
            out.grad.at(b, j) = scale * sim.grad[j] * softplus_clamp_derivative(pred.at(b, j), clamp_sharpness);
    }
    out.value = acc / static_cast<double>(batch);
    return out;
}

PredLoss loss_pred(const Tensor& pred, const Tensor& truth, std::span<const double> k_true, double lambda_comp,
                   double lambda_res, double lambda_sim, bool use_sim, const ComponentLibrary& lib,
                   const SimulatorConfig& scfg, const WatsonKConfig& kcfg, double clamp_sharpness) {
    PredLoss out;
    out.grad = Tensor(pred.shape);

    LossValue comp = loss_comp(pred, truth);
    LossValue res = loss_res(pred);
    out.comp = comp.value;
    out.res = res.value;
    for (std::size_t i = 0; i < out.grad.size(); ++i)
        out.grad[i] = lambda_comp * comp.grad[i] + lambda_res * res.grad[i];

    if (use_sim) {
        SimLoss sim = loss_sim(pred, k_true, lib, scfg, kcfg, clamp_sharpness);
        out.sim = sim.value;
        for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += lambda_sim * sim.grad[i];
    }

    out.total = lambda_comp * out.comp + lambda_res * out.res + (use_sim ? lambda_sim * out.sim : 0.0);
    if (!std::isfinite(out.total))
        raise(ErrorCode::NonFiniteLoss, "objective became non-finite (comp=" + std::to_string(out.comp) +
                                            ", res=" + std::to_string(out.res) + ", sim=" + std::to_string(out.sim) + ")");
    return out;
}

} // namespace naphtha
