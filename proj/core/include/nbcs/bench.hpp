#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace nbcs {

struct BenchConfig {
    std::vector<std::size_t> sizes = {10000, 20000, 40000};
    std::size_t d = 2;
    int q = 3;
    int repeats = 7;
    /// Fixed SVM pass count; tolerance stopping is disabled so the work per
    /// point does not depend on n.
    int epochs = 20;
    std::uint64_t seed = 1;
};

struct BenchRow {
    std::size_t n = 0;
    std::size_t d = 0;
    int q = 0;
    std::size_t leaves = 0;
    double seconds = 0.0;  ///< fastest of the repeats (sizes interleaved per repeat)
};

/// Times uniform training on synthetic polytope data for each size.
std::vector<BenchRow> run_training_bench(const BenchConfig& cfg);

}  // namespace nbcs
