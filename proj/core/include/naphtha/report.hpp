#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "naphtha/dataset.hpp"
#include "naphtha/metrics.hpp"
#include "naphtha/properties.hpp"
#include "naphtha/training.hpp"

namespace naphtha {

// Per-family association between true Watson K and predicted family totals.
struct TrendRow {
    Family family;
    std::vector<double> watson_k;       // true k per sample
    std::vector<double> family_total;   // predicted family total wt% (post-processed)
    double slope = 0.0;                 // OLS of total against k
    double pearson_r = 0.0;
};

// predictions: row-major n x 25, post-processed (non-negative, sum 100).
std::vector<TrendRow> watson_trend(std::span<const double> watson_k_true, std::span<const double> predictions,
                                   const ComponentLibrary& lib);

// parity.csv: component_index,true_wt_pct,predicted_wt_pct (row-major order).
void write_parity_csv(std::span<const double> truth, std::span<const double> pred, std::size_t n_components,
                      const std::string& path);

// Deterministic 800x800 scatter with a y=x reference line; coordinates
// rounded to 3 decimals so equal inputs give byte-identical files.
void write_parity_svg(std::span<const double> truth, std::span<const double> pred, const std::string& path);

struct ModelReportColumn {
    std::string label;          // e.g. "composition prediction model"
    TrainMode mode;
    // 5-fold validation stats (fraction scale), from training.
    std::optional<CvStats> cv_mae, cv_mse, cv_r2;
    // Test-set metrics for this checkpoint.
    MetricSet test_pooled_wt;
    MetricSet test_pooled_fraction;
    MetricSet test_per_component_wt;
    double test_watson_mae = 0.0;
};

struct ReportBundleInputs {
    std::vector<ModelReportColumn> columns; // first column is the headline model
    // Headline model arrays for parity and trend outputs.
    std::vector<double> truth_wt;  // n x 25
    std::vector<double> pred_wt;   // raw outputs, n x 25
    std::vector<double> pred_post; // post-processed, n x 25
    std::vector<double> k_true;    // n
};

// Writes metrics.csv, parity.csv, parity.svg, trend.csv and report.txt into
// an existing or creatable directory.
void write_report_bundle(const std::string& directory, const ReportBundleInputs& inputs,
                         const ComponentLibrary& lib);

} // namespace naphtha
