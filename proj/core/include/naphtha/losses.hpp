#pragma once

#include <span>
#include <vector>

#include "naphtha/layers.hpp"
#include "naphtha/properties.hpp"
#include "naphtha/simulator.hpp"
#include "naphtha/tensor.hpp"

namespace naphtha {

// Batch-mean squared L2 between predicted and true compositions.
LossValue loss_comp(const Tensor& pred, const Tensor& truth);

// Batch mean of (100 - sum_j pred_j)^2; pushes the unconstrained head toward
// mass balance.
LossValue loss_res(const Tensor& pred);

// Batch-mean squared error between predicted and true Watson K scalars.
LossValue loss_k(const Tensor& pred_k, std::span<const double> k_true);

struct SimLoss {
    double value = 0.0;
    Tensor grad;               // d loss / d raw prediction
    std::vector<double> k_sim; // per sample
};

// Simulator-in-the-loop Watson K discrepancy. Raw predictions pass through a
// softplus clamp (sharpness in 1/wt%) and normalization before entering the
// simulator; both steps stay inside the differentiated chain, so the gradient
// matches a finite difference on the raw entries.
SimLoss loss_sim(const Tensor& pred, std::span<const double> k_true, const ComponentLibrary& lib,
                 const SimulatorConfig& scfg, const WatsonKConfig& kcfg, double clamp_sharpness);

struct PredLoss {
    double comp = 0.0;
    double res = 0.0;
    double sim = 0.0;
    double total = 0.0;
    Tensor grad;
};

// Weighted objective for the composition path. With use_sim == false the
// simulator term is absent entirely (baseline objective).
PredLoss loss_pred(const Tensor& pred, const Tensor& truth, std::span<const double> k_true, double lambda_comp,
                   double lambda_res, double lambda_sim, bool use_sim, const ComponentLibrary& lib,
                   const SimulatorConfig& scfg, const WatsonKConfig& kcfg, double clamp_sharpness);

// Softplus clamp used by loss_sim: (1/beta) * log(1 + exp(beta x)).
double softplus_clamp(double x, double sharpness);
double softplus_clamp_derivative(double x, double sharpness);

} // namespace naphtha
