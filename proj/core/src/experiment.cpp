#include "nbcs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>

#include "nbcs/bounds.hpp"
#include "nbcs/error.hpp"

namespace nbcs {

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const std::vector<int>& labels,
                                                                               double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0) || fraction > 1.0) throw DomainError("train fraction must lie in (0, 1]");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> train, test;
    for (auto& [label, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto take = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size()))), 1, idx.size());
        train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
        test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    return {train, test};
}

std::pair<std::optional<double>, std::optional<double>> model_bounds(const Model& model, const LabeledDataset& train,
                                                                     double delta) {
    if (model.classes.size() != 2 || model.weights.size() != 1) return {};
    const std::size_t n = train.size();
    const std::size_t k = model.data_splits;
    if (n <= k) return {};

    const WeightVector& w = model.weights.front();
    double norm_sq = 0.0;
    for (double v : w.values()) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);

    double hinge = 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = train.labels[i] == model.classes[1] ? 1.0 : -1.0;
        const double f = decision_value(model.system, w, model.to_root(train.points[i]));
        hinge += std::max(0.0, 1.0 - y * f);
        if ((f >= 0.0 ? 1.0 : -1.0) != y) ++errors;
    }
    std::optional<double> margin;
    if (norm > 0.0 && norm <= 1.0) margin = margin_bound(n, k, norm, hinge, delta);
    const double err_hat = static_cast<double>(errors) / static_cast<double>(n);
    return {margin, vc_compression_bound(n, k, model.system.vertex_count(), err_hat, delta)};
}

TrialResult run_trial(const LabeledDataset& train, const LabeledDataset* test, const TrialConfig& cfg,
                      std::uint64_t seed, std::optional<Model>* model_out) {
    const auto start = std::chrono::steady_clock::now();
    FitOptions options = cfg.fit;
    options.svm.seed = seed;
    if (cfg.cross_validate) {
        CvConfig cv = cfg.cv;
        cv.seed = seed;
        const CvResult best = cross_validate(train, cv, options, cfg.threads);
        options.C = best.best_C;
        options.q = best.best_q;
    }
    Model model = fit(train, options);

    TrialResult r;
    r.seed = seed;
    r.C = options.C;
    r.q = options.q;
    r.stages = model.stages_used;
    r.leaves = model.system.leaf_count();
    r.data_splits = model.data_splits;
    r.train_size = train.size();
    r.train_accuracy = accuracy(model, train);
    if (test && test->size() > 0) {
        r.test_size = test->size();
        r.test_accuracy = accuracy(model, *test);
    }
    std::tie(r.margin_bound, r.vc_bound) = model_bounds(model, train, cfg.delta);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (model_out) model_out->emplace(std::move(model));
    return r;
}

std::vector<TrialResult> run_trials(const LabeledDataset& data, const TrialConfig& cfg, std::optional<Model>* first_model,
                                    LabeledDataset* first_holdout) {
    if (cfg.trials < 1) throw DomainError("need at least one trial");
    std::vector<TrialResult> out;
    for (int t = 0; t < cfg.trials; ++t) {
        const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(t);
        const auto [train_idx, test_idx] = stratified_split(data.labels, cfg.train_fraction, seed);
        const LabeledDataset train = data.subset(train_idx);
        const LabeledDataset test = data.subset(test_idx);
        TrialResult r = run_trial(train, &test, cfg, seed, t == 0 ? first_model : nullptr);
        r.trial = t;
        if (t == 0 && first_holdout) *first_holdout = test;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace nbcs
