#include "naphtha/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "naphtha/error.hpp"

namespace naphtha {

const char* metric_scale_name(MetricScale scale) {
    return scale == MetricScale::WtPct ? "wt_pct" : "fraction";
}

MetricSet metrics(std::span<const double> truth, std::span<const double> pred, MetricScale scale) {
    if (truth.size() != pred.size())
        raise(ErrorCode::ShapeMismatch, "metrics: truth has " + std::to_string(truth.size()) + " values, pred has " +
                                            std::to_string(pred.size()));
    if (truth.size() < 2) raise(ErrorCode::ShapeMismatch, "metrics need at least 2 values");

    const double n = static_cast<double>(truth.size());
    double mean = 0.0;
    for (double y : truth) mean += y;
    mean /= n;

    double abs_sum = 0.0, sq_sum = 0.0, var_sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = truth[i] - pred[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        const double c = truth[i] - mean;
        var_sum += c * c;
    }
    if (var_sum == 0.0) raise(ErrorCode::ConstantTruth, "R^2 is undefined for constant truth values");

    MetricSet m;
    m.mae = abs_sum / n;
    m.mse = sq_sum / n;
    m.r2 = 1.0 - sq_sum / var_sum;
    m.scale = scale;
    m.n = truth.size();
    return m;
}

MetricSet metrics_per_component_mean(std::span<const double> truth, std::span<const double> pred,
                                     std::size_t n_components, MetricScale scale) {
    if (truth.size() != pred.size() || n_components == 0 || truth.size() % n_components != 0)
        raise(ErrorCode::ShapeMismatch, "metrics_per_component_mean: bad matrix layout");
    const std::size_t n_samples = truth.size() / n_components;
    if (n_samples < 2) raise(ErrorCode::ShapeMismatch, "metrics need at least 2 samples");

    std::vector<double> col_t(n_samples), col_p(n_samples);
    MetricSet avg;
    avg.scale = scale;
    avg.n = truth.size();
    for (std::size_t c = 0; c < n_components; ++c) {
        for (std::size_t s = 0; s < n_samples; ++s) {
            col_t[s] = truth[s * n_components + c];
            col_p[s] = pred[s * n_components + c];
        }
        MetricSet m = metrics(col_t, col_p, scale);
        avg.mae += m.mae;
        avg.mse += m.mse;
        avg.r2 += m.r2;
    }
    avg.mae /= static_cast<double>(n_components);
    avg.mse /= static_cast<double>(n_components);
    avg.r2 /= static_cast<double>(n_components);
    return avg;
}

} // namespace naphtha
