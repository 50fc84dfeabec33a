// naphtha: batch front end for the distillation-curve composition toolkit.
//
// Verbs: components, gen, simulate, train, eval, predict.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// stdout carries data, stderr carries diagnostics.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "naphtha/checkpoint.hpp"
#include "naphtha/dataset.hpp"
#include "naphtha/error.hpp"
#include "naphtha/model.hpp"
#include "naphtha/report.hpp"
#include "naphtha/training.hpp"

namespace {

using namespace naphtha;

ComponentLibrary load_library(const std::string& path) {
    if (path.empty()) return ComponentLibrary::builtin();
    return ComponentLibrary::from_csv(path);
}

// Composition CSV: header name,wt_pct; every library component exactly once.
Composition read_composition_csv(const std::string& path, const ComponentLibrary& lib) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open composition '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("name,wt_pct", 0) != 0)
        raise(ErrorCode::SchemaMismatch, path + ": expected header name,wt_pct");
    std::vector<double> raw(lib.size(), 0.0);
    std::vector<bool> seen(lib.size(), false);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            raise(ErrorCode::SchemaMismatch, path + ":" + std::to_string(lineno) + ": expected name,value");
        std::string name = line.substr(0, comma);
        int idx = lib.index_of(name);
        if (idx < 0) raise(ErrorCode::SchemaMismatch, path + ": unknown component '" + name + "'");
        if (seen[static_cast<std::size_t>(idx)])
            raise(ErrorCode::SchemaMismatch, path + ": duplicate component '" + name + "'");
        seen[static_cast<std::size_t>(idx)] = true;
        try {
            raw[static_cast<std::size_t>(idx)] = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            raise(ErrorCode::SchemaMismatch, path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    for (std::size_t i = 0; i < lib.size(); ++i)
        if (!seen[i]) raise(ErrorCode::SchemaMismatch, path + ": missing component '" + lib.entry(i).name + "'");
    return normalize(raw);
}

// Curve CSV: header recovery_fraction,temperature_k; '#' footer lines ignored.
DistillationCurve read_curve_csv(const std::string& path, const SimulatorConfig& scfg) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open curve '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("recovery_fraction,temperature_k", 0) != 0)
        raise(ErrorCode::SchemaMismatch, path + ": expected header recovery_fraction,temperature_k");
    DistillationCurve curve;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            raise(ErrorCode::SchemaMismatch, path + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            curve.recovery_fractions.push_back(std::stod(line.substr(0, comma)));
            curve.temperatures_k.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            raise(ErrorCode::SchemaMismatch, path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    if (curve.size() != scfg.recovery_grid.size())
        raise(ErrorCode::SchemaMismatch, path + ": expected " + std::to_string(scfg.recovery_grid.size()) +
                                             " curve rows, got " + std::to_string(curve.size()));
    return curve;
}

void print_curve(std::ostream& out, const DistillationCurve& curve, double watson_k_value) {
    out << "recovery_fraction,temperature_k\n";
    char buf[80];
    for (std::size_t j = 0; j < curve.size(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", curve.recovery_fractions[j], curve.temperatures_k[j]);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "# watson_k=%.17g\n", watson_k_value);
    out << buf;
}

struct CheckpointReportMeta {
    TrainConfig cfg;
    std::vector<double> fold_mae, fold_mse, fold_r2; // fraction scale
};

std::string encode_meta(const TrainConfig& cfg, const CvResult& cv) {
    std::ostringstream os;
    os << train_config_text(cfg);
    char buf[64];
    auto emit = [&](const char* key, auto pick) {
        os << key << " =";
        for (const auto& fold : cv.folds) {
            std::snprintf(buf, sizeof(buf), " %.17g", pick(fold));
            os << buf;
        }
        os << "\n";
    };
    emit("report.fold_val_mae_fraction", [](const TrainReport& r) { return r.val_metrics_fraction.mae; });
    emit("report.fold_val_mse_fraction", [](const TrainReport& r) { return r.val_metrics_fraction.mse; });
    emit("report.fold_val_r2", [](const TrainReport& r) { return r.val_metrics_fraction.r2; });
    return os.str();
}

CheckpointReportMeta decode_meta(const std::string& text, const std::string& origin) {
    std::istringstream config_part;
    std::ostringstream cfg_lines;
    CheckpointReportMeta meta;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("report.", 0) == 0) {
            auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::vector<double>* slot = nullptr;
            if (line.rfind("report.fold_val_mae_fraction", 0) == 0) slot = &meta.fold_mae;
            else if (line.rfind("report.fold_val_mse_fraction", 0) == 0) slot = &meta.fold_mse;
            else if (line.rfind("report.fold_val_r2", 0) == 0) slot = &meta.fold_r2;
            if (!slot) continue;
            std::istringstream vals(line.substr(eq + 1));
            double v;
            while (vals >> v) slot->push_back(v);
        } else {
            cfg_lines << line << "\n";
        }
    }
    std::istringstream cfg_in(cfg_lines.str());
    meta.cfg = parse_train_config(cfg_in, origin + " (embedded config)");
    return meta;
}

std::optional<CvStats> stats_from(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    CvStats s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(values.size() - 1));
    }
    return s;
}

ModelReportColumn column_for_checkpoint(const std::string& ckpt_path, const std::string& label,
                                        const std::vector<Sample>& samples, const DatasetSplit& split,
                                        const ComponentLibrary& lib, EvalArrays* arrays_out) {
    Model model;
    CheckpointMeta raw_meta = load_checkpoint(model, ckpt_path);
    CheckpointReportMeta meta = decode_meta(raw_meta.config_echo, ckpt_path);

    EvalArrays arrays = evaluate_model(model, samples, split.test_indices);
    ModelReportColumn col;
    col.label = label.empty() ? train_mode_name(meta.cfg.mode) : label;
    col.mode = meta.cfg.mode;
    col.cv_mae = stats_from(meta.fold_mae);
    col.cv_mse = stats_from(meta.fold_mse);
    col.cv_r2 = stats_from(meta.fold_r2);
    col.test_pooled_wt = metrics(arrays.truth_wt, arrays.pred_wt, MetricScale::WtPct);
    std::vector<double> tf = arrays.truth_wt, pf = arrays.pred_wt;
    for (auto& v : tf) v /= 100.0;
    for (auto& v : pf) v /= 100.0;
    col.test_pooled_fraction = metrics(tf, pf, MetricScale::Fraction);
    col.test_per_component_wt = metrics_per_component_mean(arrays.truth_wt, arrays.pred_wt, lib.size(), MetricScale::WtPct);
    double kmae = 0.0;
    for (std::size_t i = 0; i < arrays.k_true.size(); ++i) kmae += std::abs(arrays.k_true[i] - arrays.k_pred[i]);
    col.test_watson_mae = kmae / static_cast<double>(arrays.k_true.size());
    if (arrays_out) *arrays_out = std::move(arrays);
    return col;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Distillation-curve naphtha composition toolkit"};
    app.require_subcommand(1);
    app.get_formatter()->column_width(40);

    std::string library_path;
    app.add_option("--library", library_path, "Component library CSV (default: built-in 25-component roster)");
    int threads = 1;
    app.add_option("--threads", threads, "Max internal threads")->check(CLI::PositiveNumber);

    // components
    auto* cmd_components = app.add_subcommand("components", "Dump the component library as CSV");

    // gen
    auto* cmd_gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    GeneratorConfig gcfg;
    std::string gen_out;
    cmd_gen->add_option("--n", gcfg.n_samples, "Number of samples")->capture_default_str();
    cmd_gen->add_option("--seed", gcfg.seed, "Generator seed")->capture_default_str();
    cmd_gen->add_option("--noise", gcfg.noise_wt_pct, "Additive composition noise (wt%)")->capture_default_str();
    cmd_gen->add_option("--alpha-lo", gcfg.paraffinicity_lo, "Paraffinicity lower bound")->capture_default_str();
    cmd_gen->add_option("--alpha-hi", gcfg.paraffinicity_hi, "Paraffinicity upper bound")->capture_default_str();
    cmd_gen->add_option("--out", gen_out, "Output dataset CSV")->required();

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "Distill a composition into a curve and Watson K");
    std::string sim_comp;
    cmd_sim->add_option("--composition", sim_comp, "Composition CSV (name,wt_pct)")->required();

    // train
    auto* cmd_train = app.add_subcommand("train", "Train with 5-fold cross-validation and save a checkpoint");
    std::string train_data, train_config, train_mode_flag, train_out, train_report_path;
    cmd_train->add_option("--data", train_data, "Dataset CSV")->required();
    cmd_train->add_option("--config", train_config, "Training config file (key = value lines)");
    cmd_train->add_option("--mode", train_mode_flag, "baseline|guided (overrides config)");
    std::uint64_t seed_opt_holder = 0;
    auto* seed_opt = cmd_train->add_option("--seed", seed_opt_holder, "Training seed (overrides config)");
    cmd_train->add_option("--out", train_out, "Output checkpoint path")->required();
    cmd_train->add_option("--report", train_report_path, "TrainReport CSV path (default: <out>.train.csv)");

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate a checkpoint on the dataset's test split");
    std::string eval_data, eval_ckpt, eval_baseline_ckpt, eval_out;
    cmd_eval->add_option("--data", eval_data, "Dataset CSV")->required();
    cmd_eval->add_option("--ckpt", eval_ckpt, "Checkpoint to evaluate (headline column)")->required();
    cmd_eval->add_option("--baseline-ckpt", eval_baseline_ckpt, "Second checkpoint for a comparison column");
    cmd_eval->add_option("--out", eval_out, "Report bundle directory")->required();

    // predict
    auto* cmd_predict = app.add_subcommand("predict", "Predict composition and Watson K from a curve");
    std::string pred_curve, pred_ckpt;
    bool pred_raw = false;
    cmd_predict->add_option("--curve", pred_curve, "Curve CSV (recovery_fraction,temperature_k)")->required();
    cmd_predict->add_option("--ckpt", pred_ckpt, "Checkpoint path")->required();
    cmd_predict->add_flag("--raw", pred_raw, "Print raw head output instead of the post-processed composition");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            return app.exit(e);
        }
        app.exit(e); // prints the message and usage hint to stderr
        return 1;
    }

    const ComponentLibrary lib = load_library(library_path);
    const SimulatorConfig scfg;
    const WatsonKConfig kcfg;

    if (cmd_components->parsed()) {
        lib.to_csv(std::cout);
        return 0;
    }

    if (cmd_gen->parsed()) {
        auto samples = generate(gcfg, lib, scfg, kcfg);
        save_dataset(samples, gen_out);
        std::cerr << "wrote " << samples.size() << " samples to " << gen_out << "\n";
        return 0;
    }

    if (cmd_sim->parsed()) {
        Composition c = read_composition_csv(sim_comp, lib);
        DistillationCurve curve = simulate_curve(c, lib, scfg);
        print_curve(std::cout, curve, simulated_watson_k(c, lib, scfg, kcfg).k);
        return 0;
    }

    if (cmd_train->parsed()) {
        TrainConfig cfg;
        if (!train_config.empty()) cfg = parse_train_config_file(train_config);
        if (!train_mode_flag.empty()) cfg.mode = train_mode_from_name(train_mode_flag);
        if (seed_opt->count() > 0) cfg.seed = seed_opt_holder;
        cfg.validate();

        auto samples = load_dataset(train_data, lib, scfg);
        DatasetSplit ds = split(samples.size(), cfg.split_seed);

        Model model;
        std::cerr << "training mode=" << train_mode_name(cfg.mode) << " seed=" << cfg.seed << " on "
                  << ds.train_indices.size() << " train samples, 5 folds\n";
        CvResult cv = cross_validate(model, samples, ds, cfg, lib, scfg, kcfg, threads,
                                     [&](int fold, const TrainReport& r) {
                                         std::cerr << "fold " << fold << ": best epoch " << r.best_epoch
                                                   << ", val MAE(frac) " << r.val_metrics_fraction.mae << ", "
                                                   << r.wall_seconds << " s\n";
                                     });

        CheckpointMeta meta;
        meta.seed = cfg.seed;
        meta.config_echo = encode_meta(cfg, cv);
        meta.has_optimizer_state = false;
        save_checkpoint(model, meta, train_out);

        const std::string report_path = train_report_path.empty() ? train_out + ".train.csv" : train_report_path;
        std::ofstream rep(report_path);
        if (!rep) raise(ErrorCode::IoFailure, "cannot write train report '" + report_path + "'");
        const TrainReport& best = cv.folds[static_cast<std::size_t>(cv.best_fold)];
        rep << "# mode=" << train_mode_name(cfg.mode) << " best_fold=" << cv.best_fold << " best_epoch="
            << best.best_epoch << "\n";
        rep << "epoch,loss_pred,loss_comp,loss_res";
        if (cfg.guided()) rep << ",loss_sim,loss_k";
        rep << ",val_loss\n";
        char buf[256];
        for (std::size_t e = 0; e < best.epoch_losses.size(); ++e) {
            const auto& el = best.epoch_losses[e];
            if (cfg.guided()) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e, el.pred, el.comp,
                              el.res, el.sim, el.watson, best.val_loss[e]);
            } else {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n", e, el.pred, el.comp, el.res,
                              best.val_loss[e]);
            }
            rep << buf;
        }

        std::printf("val_mae_fraction_mean=%.17g\nval_mae_fraction_std=%.17g\n", cv.mae_fraction.mean,
                    cv.mae_fraction.stddev);
        std::printf("val_mse_fraction_mean=%.17g\nval_mse_fraction_std=%.17g\n", cv.mse_fraction.mean,
                    cv.mse_fraction.stddev);
        std::printf("val_r2_mean=%.17g\nval_r2_std=%.17g\n", cv.r2.mean, cv.r2.stddev);
        return 0;
    }

    if (cmd_eval->parsed()) {
        auto samples = load_dataset(eval_data, lib, scfg);
        CheckpointMeta head_meta = peek_checkpoint(eval_ckpt);
        CheckpointReportMeta head = decode_meta(head_meta.config_echo, eval_ckpt);
        DatasetSplit ds = split(samples.size(), head.cfg.split_seed);

        ReportBundleInputs inputs;
        EvalArrays arrays;
        inputs.columns.push_back(column_for_checkpoint(eval_ckpt, "", samples, ds, lib, &arrays));
        if (!eval_baseline_ckpt.empty())
            inputs.columns.push_back(column_for_checkpoint(eval_baseline_ckpt, "", samples, ds, lib, nullptr));
        inputs.truth_wt = std::move(arrays.truth_wt);
        inputs.pred_wt = std::move(arrays.pred_wt);
        inputs.pred_post = std::move(arrays.pred_post);
        inputs.k_true = std::move(arrays.k_true);
        write_report_bundle(eval_out, inputs, lib);
        std::cerr << "report bundle written to " << eval_out << "\n";
        return 0;
    }

    if (cmd_predict->parsed()) {
        Model model;
        load_checkpoint(model, pred_ckpt);
        DistillationCurve curve = read_curve_csv(pred_curve, scfg);
        std::vector<double> comp =
            pred_raw ? model.predict_composition(curve) : model.predict_composition_normalized(curve);
        std::printf("name,wt_pct\n");
        for (std::size_t i = 0; i < lib.size(); ++i) std::printf("%s,%.17g\n", lib.entry(i).name.c_str(), comp[i]);
        std::printf("# watson_k=%.17g\n", model.predict_watson_k(curve));
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const naphtha::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return naphtha::is_numerical_failure(e.code()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
