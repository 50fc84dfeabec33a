#include "naphtha/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "naphtha/error.hpp"

namespace naphtha {

namespace {

constexpr std::size_t kMinTrendSamples = 20;

struct LinearFit {
    double slope = 0.0;
    double pearson_r = 0.0;
};

LinearFit fit_against(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    if (sxx > 0.0) f.slope = sxy / sxx;
    if (sxx > 0.0 && syy > 0.0) f.pearson_r = sxy / std::sqrt(sxx * syy);
    return f;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write '" + path + "'");
    return out;
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

} // namespace

std::vector<TrendRow> watson_trend(std::span<const double> watson_k_true, std::span<const double> predictions,
                                   const ComponentLibrary& lib) {
    const std::size_t n = watson_k_true.size();
    if (n < kMinTrendSamples)
        raise(ErrorCode::TooFewSamples,
              "trend analysis needs at least " + std::to_string(kMinTrendSamples) + " samples, got " + std::to_string(n));
    if (predictions.size() != n * lib.size())
        raise(ErrorCode::ShapeMismatch, "predictions matrix does not match sample count x library size");

    std::vector<TrendRow> rows;
    for (std::size_t f = 0; f < kFamilyCount; ++f) {
        TrendRow row;
        row.family = static_cast<Family>(f);
        row.watson_k.assign(watson_k_true.begin(), watson_k_true.end());
        row.family_total.resize(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            double total = 0.0;
            for (std::size_t i = 0; i < lib.size(); ++i)
                if (lib.entry(i).family == row.family) total += predictions[s * lib.size() + i];
            row.family_total[s] = total;
        }
        LinearFit fit = fit_against(row.watson_k, row.family_total);
        row.slope = fit.slope;
        row.pearson_r = fit.pearson_r;
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_parity_csv(std::span<const double> truth, std::span<const double> pred, std::size_t n_components,
                      const std::string& path) {
    if (truth.size() != pred.size() || n_components == 0 || truth.size() % n_components != 0)
        raise(ErrorCode::ShapeMismatch, "parity data must be matching (n x n_components) matrices");
    auto out = open_out(path);
    out << "component_index,true_wt_pct,predicted_wt_pct\n";
    char buf[96];
    for (std::size_t i = 0; i < truth.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i % n_components, truth[i], pred[i]);
        out << buf;
    }
}

void write_parity_svg(std::span<const double> truth, std::span<const double> pred, const std::string& path) {
    if (truth.size() != pred.size()) raise(ErrorCode::ShapeMismatch, "parity arrays must have equal length");
    double lo = 0.0, hi = 1.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        lo = std::min({lo, truth[i], pred[i]});
        hi = std::max({hi, truth[i], pred[i]});
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    constexpr double kSize = 800.0;
    constexpr double kMargin = 60.0;
    const double span = hi - lo;
    auto px = [&](double v) { return kMargin + (v - lo) / span * (kSize - 2.0 * kMargin); };
    auto py = [&](double v) { return kSize - kMargin - (v - lo) / span * (kSize - 2.0 * kMargin); };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n";
    out << "<rect x=\"" << fmt("%.3f", kMargin) << "\" y=\"" << fmt("%.3f", kMargin) << "\" width=\""
        << fmt("%.3f", kSize - 2 * kMargin) << "\" height=\"" << fmt("%.3f", kSize - 2 * kMargin)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt("%.3f", px(lo)) << "\" y1=\"" << fmt("%.3f", py(lo)) << "\" x2=\""
        << fmt("%.3f", px(hi)) << "\" y2=\"" << fmt("%.3f", py(hi))
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    char buf[160];
    for (std::size_t i = 0; i < truth.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.55\"/>\n",
                      px(truth[i]), py(pred[i]));
        out << buf;
    }
    out << "<text x=\"400\" y=\"790\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">true wt%</text>\n";
    out << "<text x=\"14\" y=\"400\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" "
           "transform=\"rotate(-90 14 400)\">predicted wt%</text>\n";
    out << "</svg>\n";
}

void write_report_bundle(const std::string& directory, const ReportBundleInputs& inputs, const ComponentLibrary& lib) {
    if (inputs.columns.empty()) raise(ErrorCode::ShapeMismatch, "report needs at least one model column");
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) raise(ErrorCode::IoFailure, "cannot create report directory '" + directory + "'");
    const auto path = [&](const char* name) { return directory + "/" + name; };

    // metrics.csv: headline model, pooled and per-component, both scales.
    {
        auto out = open_out(path("metrics.csv"));
        out << "scale,aggregation,n,mae,mse,r2\n";
        const auto& col = inputs.columns.front();
        auto row = [&](const MetricSet& m, const char* agg) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.17g,%.17g,%.17g\n", metric_scale_name(m.scale), agg, m.n,
                          m.mae, m.mse, m.r2);
            out << buf;
        };
        row(col.test_pooled_wt, "pooled");
        row(col.test_pooled_fraction, "pooled");
        row(col.test_per_component_wt, "per_component_mean");
        MetricSet pc_frac = col.test_per_component_wt;
        pc_frac.scale = MetricScale::Fraction;
        pc_frac.mae /= 100.0;
        pc_frac.mse /= 10000.0;
        row(pc_frac, "per_component_mean");
    }

    write_parity_csv(inputs.truth_wt, inputs.pred_wt, lib.size(), path("parity.csv"));
    write_parity_svg(inputs.truth_wt, inputs.pred_wt, path("parity.svg"));

    const auto trend = watson_trend(inputs.k_true, inputs.pred_post, lib);
    {
        auto out = open_out(path("trend.csv"));
        out << "family,true_watson_k,predicted_family_total_wt_pct\n";
        char buf[128];
        for (const auto& row : trend) {
            for (std::size_t s = 0; s < row.watson_k.size(); ++s) {
                std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g\n", family_name(row.family), row.watson_k[s],
                              row.family_total[s]);
                out << buf;
            }
        }
    }

    {
        auto out = open_out(path("report.txt"));
        out << "Comparison of the prediction models (5-fold cross-validation, fraction scale)\n";
        out << "---------------------------------------------------------------------------\n";
        char line[256];
        std::snprintf(line, sizeof(line), "%-16s", "Averaged value");
        out << line;
        for (const auto& col : inputs.columns) {
            std::snprintf(line, sizeof(line), "  %-28s", col.label.c_str());
            out << line;
        }
        out << "\n";
        auto stat_row = [&](const char* name, auto pick) {
            std::snprintf(line, sizeof(line), "%-16s", name);
            out << line;
            for (const auto& col : inputs.columns) {
                const std::optional<CvStats> s = pick(col);
                if (s) {
                    std::snprintf(line, sizeof(line), "  %.4f +/- %.4f%-12s", s->mean, s->stddev, "");
                } else {
                    std::snprintf(line, sizeof(line), "  %-28s", "n/a");
                }
                out << line;
            }
            out << "\n";
        };
        stat_row("MAE", [](const ModelReportColumn& c) { return c.cv_mae; });
        stat_row("MSE", [](const ModelReportColumn& c) { return c.cv_mse; });
        stat_row("R^2", [](const ModelReportColumn& c) { return c.cv_r2; });

        out << "\nTest set, pooled over (sample x component), raw head outputs\n";
        for (const auto& col : inputs.columns) {
            std::snprintf(line, sizeof(line),
                          "  %-28s MAE(wt%%)=%.4f MSE(wt%%)=%.4f R^2=%.4f | MAE(frac)=%.5f MSE(frac)=%.5f\n",
                          col.label.c_str(), col.test_pooled_wt.mae, col.test_pooled_wt.mse, col.test_pooled_wt.r2,
                          col.test_pooled_fraction.mae, col.test_pooled_fraction.mse);
            out << line;
            if (col.mode == TrainMode::Guided) {
                std::snprintf(line, sizeof(line), "  %-28s Watson-K head MAE=%.4f\n", "", col.test_watson_mae);
                out << line;
            }
        }

        out << "\nWatson K trend on test predictions (post-processed, headline model)\n";
        out << "  family        slope(wt%/K)  pearson_r\n";
        for (const auto& row : trend) {
            std::snprintf(line, sizeof(line), "  %-12s  %12.4f  %9.4f\n", family_name(row.family), row.slope,
                          row.pearson_r);
            out << line;
        }

        // Binned view of the same trend (5 equal-width K bins).
        double klo = *std::min_element(inputs.k_true.begin(), inputs.k_true.end());
        double khi = *std::max_element(inputs.k_true.begin(), inputs.k_true.end());
        const int bins = 5;
        out << "\n  binned means:\n";
        for (int b = 0; b < bins; ++b) {
            const double a = klo + (khi - klo) * b / bins;
            const double z = klo + (khi - klo) * (b + 1) / bins;
            std::snprintf(line, sizeof(line), "  k in [%.3f, %.3f%c:", a, z, b + 1 == bins ? ']' : ')');
            out << line;
            for (const auto& row : trend) {
                double acc = 0.0;
                int count = 0;
                for (std::size_t s = 0; s < row.watson_k.size(); ++s) {
                    const double k = row.watson_k[s];
                    const bool in_bin = (k >= a && k < z) || (b + 1 == bins && k == z);
                    if (in_bin) {
                        acc += row.family_total[s];
                        ++count;
                    }
                }
                std::snprintf(line, sizeof(line), " %s=%s", family_name(row.family),
                              count ? fmt("%.2f", acc / count).c_str() : "-");
                out << line;
            }
            out << "\n";
        }
    }
}

} // namespace naphtha
