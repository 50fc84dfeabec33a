#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "naphtha/dataset.hpp"
#include "naphtha/losses.hpp"
#include "naphtha/metrics.hpp"
#include "naphtha/model.hpp"
#include "naphtha/optimizer.hpp"

namespace naphtha {

enum class TrainMode { Baseline, Guided };

const char* train_mode_name(TrainMode mode);
TrainMode train_mode_from_name(const std::string& name);

struct TrainConfig {
    int batch_size = 8;
    AdamConfig adam;
    double lambda_comp = 0.1;
    double lambda_res = 0.001;
    double lambda_sim = 1.0;
    int watson_steps_per_cycle = 2; // phase-B updates per phase-A update
    int epochs = 300;
    int patience = 30;              // early stop on validation objective
    double clamp_sharpness = 8.0;   // softplus clamp in loss_sim, 1/wt%
    TrainMode mode = TrainMode::Guided;
    std::uint64_t seed = 0;
    std::uint64_t split_seed = 0;

    bool guided() const { return mode == TrainMode::Guided; }
    void validate() const;
};

// Flat `key = value` text, one key per line, '#' comments allowed. Unknown
// or duplicate keys are rejected.
TrainConfig parse_train_config(std::istream& in, const std::string& origin);
TrainConfig parse_train_config_file(const std::string& path);
std::string train_config_text(const TrainConfig& cfg);

struct EpochLosses {
    double comp = 0.0;
    double res = 0.0;
    double sim = 0.0;
    double watson = 0.0; // phase-B loss_k mean (guided only)
    double pred = 0.0;   // lambda-weighted objective
};

struct TrainReport {
    TrainMode mode = TrainMode::Guided;
    std::vector<EpochLosses> epoch_losses; // training means per epoch
    std::vector<double> val_loss;          // validation objective per epoch
    int best_epoch = -1;
    double wall_seconds = 0.0;
    MetricSet val_metrics_wt;
    MetricSet val_metrics_fraction;
    double val_watson_mae = 0.0; // guided only; 0 when baseline
};

// Test points for the loop invariants: called after every optimizer update,
// phase 'A' (composition objective) or 'B' (Watson objective).
struct TrainHooks {
    std::function<void(char phase, Model& model)> after_phase;
    std::function<void(int epoch, const EpochLosses& losses, double val_loss)> on_epoch;
};

// One Alg-1 style run: phase A updates (theta_f, theta_e) on the composition
// objective; in guided mode each cycle follows with watson_steps_per_cycle
// phase-B updates of (theta_f, theta_w) on fresh mini-batches. Keeps the
// parameters of the best validation epoch.
TrainReport train_fold(Model& model, const std::vector<Sample>& samples, std::span<const std::size_t> train_idx,
                       std::span<const std::size_t> val_idx, const TrainConfig& cfg, const ComponentLibrary& lib,
                       const SimulatorConfig& scfg = {}, const WatsonKConfig& kcfg = {},
                       const TrainHooks* hooks = nullptr, std::uint64_t stream_tag = 0);

// Trains against fold 0 as the validation fold.
TrainReport train(Model& model, const std::vector<Sample>& samples, const DatasetSplit& split, const TrainConfig& cfg,
                  const ComponentLibrary& lib, const SimulatorConfig& scfg = {}, const WatsonKConfig& kcfg = {},
                  const TrainHooks* hooks = nullptr);

struct CvStats {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation over folds
};

struct CvResult {
    std::vector<TrainReport> folds;
    CvStats mae_fraction, mse_fraction, r2;
    CvStats mae_wt, mse_wt;
    int best_fold = 0; // lowest validation objective
};

// 5 models, each validating on one held-out fold. model_out receives the
// best fold's parameters. threads > 1 trains folds concurrently; results are
// identical to the sequential order because every fold derives its own
// random streams from (seed, fold).
CvResult cross_validate(Model& model_out, const std::vector<Sample>& samples, const DatasetSplit& split,
                        const TrainConfig& cfg, const ComponentLibrary& lib, const SimulatorConfig& scfg = {},
                        const WatsonKConfig& kcfg = {}, int threads = 1,
                        const std::function<void(int fold, const TrainReport&)>& on_fold = nullptr);

// Raw-output test metrics plus Watson-head MAE for a trained model.
struct EvalArrays {
    std::vector<double> truth_wt;  // row-major n x 25
    std::vector<double> pred_wt;   // raw model outputs
    std::vector<double> pred_post; // clamped + renormalized
    std::vector<double> k_true;
    std::vector<double> k_pred;
};
EvalArrays evaluate_model(Model& model, const std::vector<Sample>& samples, std::span<const std::size_t> indices);

} // namespace naphtha
