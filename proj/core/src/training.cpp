#include "naphtha/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "naphtha/error.hpp"
#include "naphtha/rng.hpp"

namespace naphtha {

namespace {

struct Batch {
    Tensor x;
    Tensor truth;
    std::vector<double> k;
};

Batch make_batch(const Model& model, const std::vector<Sample>& samples, std::span<const std::size_t> idx) {
    std::vector<const DistillationCurve*> curves;
    curves.reserve(idx.size());
    for (std::size_t i : idx) curves.push_back(&samples[i].curve);
    Batch b;
    b.x = model.batch_from_curves(curves);
    b.truth = Tensor({idx.size(), samples[idx[0]].composition.wt_pct.size()});
    b.k.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const Sample& s = samples[idx[r]];
        std::copy(s.composition.wt_pct.begin(), s.composition.wt_pct.end(), b.truth.data.begin() + r * b.truth.dim(1));
        b.k[r] = s.watson_k;
    }
    return b;
}

double validation_objective(Model& model, const std::vector<Sample>& samples, std::span<const std::size_t> val_idx,
                            const TrainConfig& cfg, const ComponentLibrary& lib, const SimulatorConfig& scfg,
                            const WatsonKConfig& kcfg) {
    double total = 0.0;
    std::size_t count = 0;
    const std::size_t m = static_cast<std::size_t>(cfg.batch_size);
    for (std::size_t start = 0; start < val_idx.size(); start += m) {
        auto idx = val_idx.subspan(start, std::min(m, val_idx.size() - start));
        Batch b = make_batch(model, samples, idx);
        Tensor pred = model.forward_composition(b.x);
        PredLoss pl = loss_pred(pred, b.truth, b.k, cfg.lambda_comp, cfg.lambda_res, cfg.lambda_sim, cfg.guided(), lib,
                                scfg, kcfg, cfg.clamp_sharpness);
        total += pl.total * static_cast<double>(idx.size());
        count += idx.size();
    }
    return total / static_cast<double>(count);
}

CvStats stats_over_folds(const std::vector<double>& values) {
    CvStats s;
    const double n = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= n;
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / (n - 1.0));
    }
    return s;
}

} // namespace

const char* train_mode_name(TrainMode mode) {
    return mode == TrainMode::Baseline ? "baseline" : "guided";
}

TrainMode train_mode_from_name(const std::string& name) {
    if (name == "baseline") return TrainMode::Baseline;
    if (name == "guided") return TrainMode::Guided;
    raise(ErrorCode::SchemaMismatch, "unknown training mode '" + name + "' (expected baseline or guided)");
}

void TrainConfig::validate() const {
    adam.validate();
    if (batch_size < 1) raise(ErrorCode::DegenerateConfig, "batch_size must be >= 1");
    if (lambda_comp < 0.0 || lambda_res < 0.0 || lambda_sim < 0.0)
        raise(ErrorCode::DegenerateConfig, "loss weights must be non-negative");
    if (watson_steps_per_cycle < 0) raise(ErrorCode::DegenerateConfig, "watson_steps_per_cycle must be >= 0");
    if (epochs < 1) raise(ErrorCode::DegenerateConfig, "epochs must be >= 1");
    if (patience < 1) raise(ErrorCode::DegenerateConfig, "patience must be >= 1");
    if (!(clamp_sharpness > 0.0)) raise(ErrorCode::DegenerateConfig, "clamp_sharpness must be positive");
}

TrainConfig parse_train_config(std::istream& in, const std::string& origin) {
    TrainConfig cfg;
    std::vector<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) raise(ErrorCode::SchemaMismatch, where + ": expected key = value");
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty()) raise(ErrorCode::SchemaMismatch, where + ": expected key = value");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            raise(ErrorCode::SchemaMismatch, where + ": duplicate key '" + key + "'");
        seen.push_back(key);

        auto as_double = [&](double& slot) {
            try {
                std::size_t pos = 0;
                slot = std::stod(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                raise(ErrorCode::SchemaMismatch, where + ": bad numeric value '" + value + "'");
            }
        };
        auto as_int = [&](int& slot) {
            try {
                std::size_t pos = 0;
                slot = std::stoi(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                raise(ErrorCode::SchemaMismatch, where + ": bad integer value '" + value + "'");
            }
        };
        auto as_u64 = [&](std::uint64_t& slot) {
            try {
                std::size_t pos = 0;
                slot = std::stoull(value, &pos);
                if (pos != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                raise(ErrorCode::SchemaMismatch, where + ": bad seed value '" + value + "'");
            }
        };

        if (key == "batch_size") as_int(cfg.batch_size);
        else if (key == "learning_rate") as_double(cfg.adam.learning_rate);
        else if (key == "beta1") as_double(cfg.adam.beta1);
        else if (key == "beta2") as_double(cfg.adam.beta2);
        else if (key == "epsilon") as_double(cfg.adam.epsilon);
        else if (key == "lambda_comp") as_double(cfg.lambda_comp);
        else if (key == "lambda_res") as_double(cfg.lambda_res);
        else if (key == "lambda_sim") as_double(cfg.lambda_sim);
        else if (key == "watson_steps_per_cycle") as_int(cfg.watson_steps_per_cycle);
        else if (key == "epochs") as_int(cfg.epochs);
        else if (key == "patience") as_int(cfg.patience);
        else if (key == "clamp_sharpness") as_double(cfg.clamp_sharpness);
        else if (key == "mode") cfg.mode = train_mode_from_name(value);
        else if (key == "seed") as_u64(cfg.seed);
        else if (key == "split_seed") as_u64(cfg.split_seed);
        else raise(ErrorCode::SchemaMismatch, where + ": unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

TrainConfig parse_train_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open training config '" + path + "'");
    return parse_train_config(in, path);
}

std::string train_config_text(const TrainConfig& cfg) {
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "batch_size = %d\n"
                  "learning_rate = %.17g\n"
                  "beta1 = %.17g\n"
                  "beta2 = %.17g\n"
                  "epsilon = %.17g\n"
                  "lambda_comp = %.17g\n"
                  "lambda_res = %.17g\n"
                  "lambda_sim = %.17g\n"
                  "watson_steps_per_cycle = %d\n"
                  "epochs = %d\n"
                  "patience = %d\n"
                  "clamp_sharpness = %.17g\n"
                  "mode = %s\n"
                  "seed = %llu\n"
                  "split_seed = %llu\n",
                  cfg.batch_size, cfg.adam.learning_rate, cfg.adam.beta1, cfg.adam.beta2, cfg.adam.epsilon,
                  cfg.lambda_comp, cfg.lambda_res, cfg.lambda_sim, cfg.watson_steps_per_cycle, cfg.epochs,
                  cfg.patience, cfg.clamp_sharpness, train_mode_name(cfg.mode),
                  static_cast<unsigned long long>(cfg.seed), static_cast<unsigned long long>(cfg.split_seed));
    return buf;
}

TrainReport train_fold(Model& model, const std::vector<Sample>& samples, std::span<const std::size_t> train_idx,
                       std::span<const std::size_t> val_idx, const TrainConfig& cfg, const ComponentLibrary& lib,
                       const SimulatorConfig& scfg, const WatsonKConfig& kcfg, const TrainHooks* hooks,
                       std::uint64_t stream_tag) {
    cfg.validate();
    scfg.validate();
    if (train_idx.empty() || val_idx.empty()) raise(ErrorCode::TooFewSamples, "empty train or validation set");
    const auto start_time = std::chrono::steady_clock::now();

    model.init_params(Rng::derive_seed(cfg.seed, 0x1217 + stream_tag));
    Rng shuffle_rng = Rng::substream(Rng::derive_seed(cfg.seed, 0x5118 + stream_tag), 0);
    Rng watson_rng = Rng::substream(Rng::derive_seed(cfg.seed, 0x9a77 + stream_tag), 0);

    std::vector<std::size_t> order(train_idx.begin(), train_idx.end());
    const std::size_t m = static_cast<std::size_t>(cfg.batch_size);
    std::vector<std::size_t> watson_batch(m);

    TrainReport report;
    report.mode = cfg.mode;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_params;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        EpochLosses acc;
        std::size_t n_batches = 0, n_watson_batches = 0;

        for (std::size_t start = 0; start < order.size(); start += m) {
            auto idx = std::span<const std::size_t>(order).subspan(start, std::min(m, order.size() - start));

            // Phase A: composition objective updates theta_f and theta_e.
            Batch batch = make_batch(model, samples, idx);
            Tensor pred = model.forward_composition(batch.x);
            PredLoss pl = loss_pred(pred, batch.truth, batch.k, cfg.lambda_comp, cfg.lambda_res, cfg.lambda_sim,
                                    cfg.guided(), lib, scfg, kcfg, cfg.clamp_sharpness);
            model.backward_composition(pl.grad);
            adam_step(model.params(), "f", cfg.adam);
            adam_step(model.params(), "e", cfg.adam);
            if (hooks && hooks->after_phase) hooks->after_phase('A', model);

            acc.comp += pl.comp;
            acc.res += pl.res;
            acc.sim += pl.sim;
            acc.pred += pl.total;
            ++n_batches;

            // Phase B: Watson objective updates theta_f and theta_w on fresh
            // mini-batches drawn i.i.d. from the training set.
            if (cfg.guided()) {
                for (int wstep = 0; wstep < cfg.watson_steps_per_cycle; ++wstep) {
                    for (std::size_t r = 0; r < m; ++r)
                        watson_batch[r] = train_idx[watson_rng.next_below(train_idx.size())];
                    Batch wb = make_batch(model, samples, watson_batch);
                    Tensor kpred = model.forward_watson(wb.x);
                    LossValue lk = loss_k(kpred, wb.k);
                    if (!std::isfinite(lk.value)) raise(ErrorCode::NonFiniteLoss, "watson objective became non-finite");
                    model.backward_watson(lk.grad);
                    adam_step(model.params(), "f", cfg.adam);
                    adam_step(model.params(), "w", cfg.adam);
                    if (hooks && hooks->after_phase) hooks->after_phase('B', model);
                    acc.watson += lk.value;
                    ++n_watson_batches;
                }
            }
        }

        acc.comp /= static_cast<double>(n_batches);
        acc.res /= static_cast<double>(n_batches);
        acc.sim /= static_cast<double>(n_batches);
        acc.pred /= static_cast<double>(n_batches);
        if (n_watson_batches) acc.watson /= static_cast<double>(n_watson_batches);
        report.epoch_losses.push_back(acc);

        const double val = validation_objective(model, samples, val_idx, cfg, lib, scfg, kcfg);
        report.val_loss.push_back(val);
        if (hooks && hooks->on_epoch) hooks->on_epoch(epoch, acc, val);

        if (val < best_val) {
            best_val = val;
            report.best_epoch = epoch;
            best_params = model.params().snapshot_values();
        } else if (epoch - report.best_epoch >= cfg.patience) {
            break;
        }
    }

    model.params().restore_values(best_params);

    // Validation metrics of the selected parameters, raw head outputs.
    EvalArrays arrays = evaluate_model(model, samples, val_idx);
    report.val_metrics_wt = metrics(arrays.truth_wt, arrays.pred_wt, MetricScale::WtPct);
    std::vector<double> truth_frac = arrays.truth_wt, pred_frac = arrays.pred_wt;
    for (auto& v : truth_frac) v /= 100.0;
    for (auto& v : pred_frac) v /= 100.0;
    report.val_metrics_fraction = metrics(truth_frac, pred_frac, MetricScale::Fraction);
    if (cfg.guided()) {
        double mae = 0.0;
        for (std::size_t i = 0; i < arrays.k_true.size(); ++i) mae += std::abs(arrays.k_true[i] - arrays.k_pred[i]);
        report.val_watson_mae = mae / static_cast<double>(arrays.k_true.size());
    }

    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
    return report;
}

TrainReport train(Model& model, const std::vector<Sample>& samples, const DatasetSplit& split, const TrainConfig& cfg,
                  const ComponentLibrary& lib, const SimulatorConfig& scfg, const WatsonKConfig& kcfg,
                  const TrainHooks* hooks) {
    std::vector<std::size_t> train_idx;
    for (std::size_t f = 1; f < kFoldCount; ++f)
        train_idx.insert(train_idx.end(), split.folds[f].begin(), split.folds[f].end());
    return train_fold(model, samples, train_idx, split.folds[0], cfg, lib, scfg, kcfg, hooks, 0);
}

CvResult cross_validate(Model& model_out, const std::vector<Sample>& samples, const DatasetSplit& split,
                        const TrainConfig& cfg, const ComponentLibrary& lib, const SimulatorConfig& scfg,
                        const WatsonKConfig& kcfg, int threads,
                        const std::function<void(int fold, const TrainReport&)>& on_fold) {
    CvResult result;
    result.folds.resize(kFoldCount);
    std::vector<std::vector<double>> fold_params(kFoldCount);
    std::vector<std::exception_ptr> errors(kFoldCount);

    auto run_fold = [&](std::size_t f) {
        try {
            std::vector<std::size_t> train_idx;
            for (std::size_t g = 0; g < kFoldCount; ++g)
                if (g != f) train_idx.insert(train_idx.end(), split.folds[g].begin(), split.folds[g].end());
            Model model(model_out.config());
            result.folds[f] = train_fold(model, samples, train_idx, split.folds[f], cfg, lib, scfg, kcfg, nullptr, f);
            fold_params[f] = model.params().snapshot_values();
        } catch (...) {
            errors[f] = std::current_exception();
        }
    };

    if (threads <= 1) {
        for (std::size_t f = 0; f < kFoldCount; ++f) run_fold(f);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t f = 0; f < kFoldCount; ++f) {
            pool.emplace_back(run_fold, f);
            if (pool.size() == static_cast<std::size_t>(threads) || f + 1 == kFoldCount) {
                for (auto& t : pool) t.join();
                pool.clear();
            }
        }
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);

    std::vector<double> mae_f, mse_f, r2, mae_w, mse_w;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < kFoldCount; ++f) {
        const TrainReport& r = result.folds[f];
        if (on_fold) on_fold(static_cast<int>(f), r);
        mae_f.push_back(r.val_metrics_fraction.mae);
        mse_f.push_back(r.val_metrics_fraction.mse);
        r2.push_back(r.val_metrics_fraction.r2);
        mae_w.push_back(r.val_metrics_wt.mae);
        mse_w.push_back(r.val_metrics_wt.mse);
        const double fold_best = r.val_loss[static_cast<std::size_t>(r.best_epoch)];
        if (fold_best < best_val) {
            best_val = fold_best;
            result.best_fold = static_cast<int>(f);
        }
    }
    result.mae_fraction = stats_over_folds(mae_f);
    result.mse_fraction = stats_over_folds(mse_f);
    result.r2 = stats_over_folds(r2);
    result.mae_wt = stats_over_folds(mae_w);
    result.mse_wt = stats_over_folds(mse_w);

    model_out.params().restore_values(fold_params[static_cast<std::size_t>(result.best_fold)]);
    return result;
}

EvalArrays evaluate_model(Model& model, const std::vector<Sample>& samples, std::span<const std::size_t> indices) {
    if (indices.empty()) raise(ErrorCode::TooFewSamples, "cannot evaluate on an empty index set");
    EvalArrays out;
    const std::size_t nc = samples[indices[0]].composition.wt_pct.size();
    out.truth_wt.reserve(indices.size() * nc);
    out.pred_wt.reserve(indices.size() * nc);
    out.pred_post.reserve(indices.size() * nc);
    for (std::size_t i : indices) {
        const Sample& s = samples[i];
        std::vector<double> raw = model.predict_composition(s.curve);
        std::vector<double> clamped = raw;
        for (auto& v : clamped) v = v > 0.0 ? v : 0.0;
        std::vector<double> post = normalize(clamped).wt_pct;
        out.truth_wt.insert(out.truth_wt.end(), s.composition.wt_pct.begin(), s.composition.wt_pct.end());
        out.pred_wt.insert(out.pred_wt.end(), raw.begin(), raw.end());
        out.pred_post.insert(out.pred_post.end(), post.begin(), post.end());
        out.k_true.push_back(s.watson_k);
        out.k_pred.push_back(model.predict_watson_k(s.curve));
    }
    return out;
}

} // namespace naphtha
