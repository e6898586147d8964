#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nbcs/nested_system.hpp"

namespace nbcs {

/// Rows of (d+1)-sparse embeddings with +1/-1 labels.
struct SparseDataset {
    std::vector<SparseEmbedding> rows;
    std::vector<int> labels;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return rows.size(); }
    /// Throws DataError on labels outside {-1,+1} or indices >= dim.
    void validate() const;
};

enum class SvmSolver {
    /// Dual coordinate descent over the box-constrained dual (one coordinate
    /// per row, seeded random order each epoch). Converges linearly.
    DualCoordinate,
    /// Pegasos stochastic subgradient on the primal, final iterate.
    Pegasos,
};

struct SvmConfig {
    double C = 1.0;
    SvmSolver solver = SvmSolver::DualCoordinate;
    /// Upper bound on passes over the data.
    int epochs = 2000;
    std::uint64_t seed = 1;
    /// DualCoordinate: stop when the projected-gradient spread of an epoch
    /// drops below this. Pegasos: stop when the relative objective change
    /// between epochs drops below this. Zero disables early stopping.
    double tolerance = 1e-4;
    /// Per-class multipliers on the hinge term.
    double positive_cost = 1.0;
    double negative_cost = 1.0;
};

struct SvmResult {
    std::vector<double> weights;
    double objective = 0.0;
    int epochs_run = 0;
};

/// (1/2)|w|^2 + C * sum_i cost(y_i) * max(0, 1 - y_i w.x_i)
double hinge_objective(std::span<const double> w, const SparseDataset& data, double C,
                       double positive_cost = 1.0, double negative_cost = 1.0);

/// Minimises hinge_objective over w (no bias term). Deterministic for a fixed
/// seed. Throws DomainError on an empty dataset or a
/// single-class dataset (callers should build a constant classifier instead).
SvmResult train_svm(const SparseDataset& data, const SvmConfig& cfg);

inline double sparse_dot(std::span<const double> w, const SparseEmbedding& x) {
    double s = 0.0;
    for (const auto& e : x.entries) s += w[e.index] * e.value;
    return s;
}

}  // namespace nbcs
