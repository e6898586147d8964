#include "nbcs/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "nbcs/error.hpp"

namespace nbcs {

void SparseDataset::validate() const {
    if (labels.size() != rows.size()) throw DataError("dataset has mismatched row and label counts");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1)
            throw DataError("row " + std::to_string(i) + ": label must be +1 or -1");
        for (const auto& e : rows[i].entries)
            if (e.index >= dim)
                throw DataError("row " + std::to_string(i) + ": feature index " +
                                std::to_string(e.index) + " >= dim " + std::to_string(dim));
    }
}

double hinge_objective(std::span<const double> w, const SparseDataset& data, double C,
                       double positive_cost, double negative_cost) {
    double reg = 0.0;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const double y = data.labels[i];
        const double h = std::max(0.0, 1.0 - y * sparse_dot(w, data.rows[i]));
        loss += (y > 0 ? positive_cost : negative_cost) * h;
    }
    return 0.5 * reg + C * loss;
}

namespace {

double row_cost(const SvmConfig& cfg, int label) {
    return label > 0 ? cfg.positive_cost : cfg.negative_cost;
}

SvmResult train_dual_coordinate(const SparseDataset& data, const SvmConfig& cfg) {
    const std::size_t n = data.rows.size();
    std::vector<double> w(data.dim, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> diag(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& e : data.rows[i].entries) diag[i] += e.value * e.value;

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    SvmResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double pg_max = -std::numeric_limits<double>::infinity();
        double pg_min = std::numeric_limits<double>::infinity();
        for (std::size_t i : order) {
            if (diag[i] <= 0.0) continue;
            const double y = data.labels[i];
            const double upper = cfg.C * row_cost(cfg, data.labels[i]);
            const double g = y * sparse_dot(w, data.rows[i]) - 1.0;
            double pg = g;
            if (alpha[i] <= 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] >= upper)
                pg = std::max(g, 0.0);
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (pg == 0.0) continue;
            const double updated = std::clamp(alpha[i] - g / diag[i], 0.0, upper);
            const double delta = (updated - alpha[i]) * y;
            alpha[i] = updated;
            for (const auto& e : data.rows[i].entries) w[e.index] += delta * e.value;
        }
        result.epochs_run = epoch + 1;
        if (cfg.tolerance > 0.0 && pg_max - pg_min <= cfg.tolerance) break;
    }
    result.objective = hinge_objective(w, data, cfg.C, cfg.positive_cost, cfg.negative_cost);
    result.weights = std::move(w);
    return result;
}

SvmResult train_pegasos(const SparseDataset& data, const SvmConfig& cfg) {
    const std::size_t n = data.rows.size();
    const double lambda = 1.0 / (static_cast<double>(n) * cfg.C);
    const double max_cost = std::max(cfg.positive_cost, cfg.negative_cost);
    const double radius = std::sqrt(max_cost / lambda);

    // w = scale * v, so the shrink step is O(1) and updates touch only nonzeros.
    std::vector<double> v(data.dim, 0.0);
    double scale = 1.0;
    double v_sq = 0.0;
    std::vector<double> w(data.dim, 0.0);

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    SvmResult result;
    double previous = hinge_objective(w, data, cfg.C, cfg.positive_cost, cfg.negative_cost);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto& row = data.rows[i];
            const double y = data.labels[i];
            const double margin = y * scale * sparse_dot(v, row);

            scale *= 1.0 - 1.0 / static_cast<double>(t);
            if (scale < 1e-9) {
                if (scale == 0.0) {
                    std::fill(v.begin(), v.end(), 0.0);
                    v_sq = 0.0;
                } else {
                    v_sq = 0.0;
                    for (double& x : v) {
                        x *= scale;
                        v_sq += x * x;
                    }
                }
                scale = 1.0;
            }
            if (margin < 1.0) {
                const double step = eta * row_cost(cfg, data.labels[i]) * y / scale;
                for (const auto& e : row.entries) {
                    const double old = v[e.index];
                    const double nv = old + step * e.value;
                    v_sq += nv * nv - old * old;
                    v[e.index] = nv;
                }
            }
            const double norm = scale * std::sqrt(std::max(v_sq, 0.0));
            if (norm > radius) scale *= radius / norm;
        }
        for (std::size_t j = 0; j < v.size(); ++j) w[j] = scale * v[j];
        const double obj = hinge_objective(w, data, cfg.C, cfg.positive_cost, cfg.negative_cost);
        result.epochs_run = epoch + 1;
        result.objective = obj;
        if (cfg.tolerance > 0.0 &&
            std::abs(previous - obj) <= cfg.tolerance * std::max(std::abs(previous), 1e-12))
            break;
        previous = obj;
    }
    result.weights = std::move(w);
    return result;
}

}  // namespace

SvmResult train_svm(const SparseDataset& data, const SvmConfig& cfg) {
    if (!(cfg.C > 0.0)) throw DomainError("SVM C must be positive");
    if (cfg.epochs < 1) throw DomainError("SVM epochs must be at least 1");
    if (!(cfg.positive_cost > 0.0) || !(cfg.negative_cost > 0.0))
        throw DomainError("SVM class costs must be positive");
    if (data.rows.empty()) throw DomainError("cannot train an SVM on an empty dataset");
    data.validate();
    const bool has_pos = std::find(data.labels.begin(), data.labels.end(), 1) != data.labels.end();
    const bool has_neg = std::find(data.labels.begin(), data.labels.end(), -1) != data.labels.end();
    if (!has_pos || !has_neg)
        throw DomainError("training data contains a single class; emit a constant classifier");

    switch (cfg.solver) {
        case SvmSolver::Pegasos:
            return train_pegasos(data, cfg);
        case SvmSolver::DualCoordinate:
        default:
            return train_dual_coordinate(data, cfg);
    }
}

}  // namespace nbcs
