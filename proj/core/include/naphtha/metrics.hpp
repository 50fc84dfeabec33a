#pragma once

#include <cstddef>
#include <span>

namespace naphtha {

enum class MetricScale { WtPct, Fraction };

const char* metric_scale_name(MetricScale scale);

struct MetricSet {
    double mae = 0.0;
    double mse = 0.0;
    double r2 = 0.0;
    MetricScale scale = MetricScale::WtPct;
    std::size_t n = 0; // (sample, component) pairs pooled
};

// Pooled over every element of the two arrays:
//   MAE = mean |y - yhat|, MSE = mean (y - yhat)^2,
//   R^2 = 1 - sum (y - yhat)^2 / sum (y - ybar)^2 with ybar the pooled mean.
// Values are taken as-is; `scale` only labels the result.
MetricSet metrics(std::span<const double> truth, std::span<const double> pred, MetricScale scale);

// Per-component metrics averaged across components. truth/pred are row-major
// (n_samples x n_components).
MetricSet metrics_per_component_mean(std::span<const double> truth, std::span<const double> pred,
                                     std::size_t n_components, MetricScale scale);

} // namespace naphtha
