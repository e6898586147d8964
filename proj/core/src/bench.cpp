#include "nbcs/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "nbcs/error.hpp"
#include "nbcs/learner.hpp"

namespace nbcs {

std::vector<BenchRow> run_training_bench(const BenchConfig& cfg) {
    if (cfg.repeats < 1) throw DomainError("bench needs at least one repeat");
    FitOptions options;
    options.svm.epochs = cfg.epochs;
    options.svm.tolerance = 0.0;
    options.svm.seed = cfg.seed;

    std::vector<LabeledDataset> data;
    std::vector<BenchRow> rows;
    for (std::size_t n : cfg.sizes) {
        data.push_back(generate_polytope_dataset(n, cfg.d, 5, 0.0, cfg.seed).data);
        rows.push_back(BenchRow{n, cfg.d, cfg.q, 0, std::numeric_limits<double>::infinity()});
    }
    // Sizes are interleaved within each repeat so that slow drifts in machine
    // speed hit every size alike and cancel in the ratios.
    for (int r = 0; r < cfg.repeats; ++r) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto start = std::chrono::steady_clock::now();
            const Model model = fit_uniform(data[i], cfg.q, 1.0, options);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            rows[i].seconds = std::min(rows[i].seconds, elapsed.count());
            rows[i].leaves = model.system.leaf_count();
        }
    }
    return rows;
}

}  // namespace nbcs
