#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nbcs/learner.hpp"

namespace nbcs {

/// Random train/test protocol: each trial draws a stratified split with
/// seed + trial, optionally picks (C, q) by cross-validation on the training
/// part, trains, and scores both parts.
struct TrialConfig {
    FitOptions fit;
    bool cross_validate = false;
    CvConfig cv;
    double train_fraction = 0.7;
    int trials = 1;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    double delta = 0.05;  ///< confidence for the reported bounds
};

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double C = 0.0;
    int q = 0;
    int stages = 0;
    std::size_t leaves = 0;
    std::size_t data_splits = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double train_accuracy = 0.0;
    std::optional<double> test_accuracy;
    std::optional<double> margin_bound;
    std::optional<double> vc_bound;
    double seconds = 0.0;
};

/// Per class, the first round(fraction * count) of a seeded shuffle go to
/// training (at least one). Both index lists are sorted.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const std::vector<int>& labels,
                                                                               double fraction, std::uint64_t seed);

/// Trains on `train` with the given seed and scores it; `test` may be null.
TrialResult run_trial(const LabeledDataset& train, const LabeledDataset* test, const TrialConfig& cfg,
                      std::uint64_t seed, std::optional<Model>* model_out = nullptr);

/// cfg.trials random splits of `data`. The first trial's model and held-out
/// part are returned through the optional out-parameters.
std::vector<TrialResult> run_trials(const LabeledDataset& data, const TrialConfig& cfg, std::optional<Model>* first_model = nullptr,
                                    LabeledDataset* first_holdout = nullptr);

/// Bounds for a binary model on its training data; nullopt where a formula's
/// preconditions fail (multiclass, |w| > 1, n <= k).
std::pair<std::optional<double>, std::optional<double>> model_bounds(const Model& model, const LabeledDataset& train,
                                                                     double delta);

}  // namespace nbcs
