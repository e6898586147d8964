#include "nbcs/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "nbcs/error.hpp"
#include "nbcs/parallel.hpp"

namespace nbcs {

namespace {

// One binary problem per weight vector: class index treated as positive.
std::vector<std::size_t> positive_classes(std::size_t class_count) {
    if (class_count < 2) return {};
    if (class_count == 2) return {1};
    std::vector<std::size_t> out(class_count);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
}

std::vector<std::size_t> class_index_of(const std::vector<int>& labels, const std::vector<int>& classes) {
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[i] = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), labels[i]) - classes.begin());
    return out;
}

int choose_class(const std::vector<double>& values, const std::vector<int>& classes) {
    if (classes.size() == 1) return classes[0];
    if (classes.size() == 2) return values[0] >= 0.0 ? classes[1] : classes[0];
    std::size_t best = 0;
    for (std::size_t c = 1; c < values.size(); ++c)
        if (values[c] > values[best]) best = c;
    return classes[best];
}

std::vector<double> decisions_for(const SparseEmbedding& e, const std::vector<WeightVector>& weights) {
    std::vector<double> out;
    out.reserve(weights.size());
    for (const auto& w : weights) out.push_back(decision_value(e, w));
    return out;
}

std::vector<SparseEmbedding> embed_all(const NestedSystem& sys, const std::vector<Point>& pts) {
    std::vector<SparseEmbedding> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(sys.embed(p));
    return out;
}

SparseDataset binary_problem(const std::vector<SparseEmbedding>& rows,
                             const std::vector<std::size_t>& class_idx, std::size_t positive,
                             std::size_t dim) {
    SparseDataset ds;
    ds.rows = rows;
    ds.dim = dim;
    ds.labels.reserve(rows.size());
    for (std::size_t c : class_idx) ds.labels.push_back(c == positive ? 1 : -1);
    return ds;
}

// Trains every binary problem. With a warm start, the lifted previous weights
// are kept whenever they score a lower objective than the retrained ones.
std::vector<WeightVector> train_classes(const NestedSystem& sys, const std::vector<SparseEmbedding>& rows,
                                        const std::vector<std::size_t>& class_idx, std::size_t class_count,
                                        double C, const SvmConfig& base,
                                        const std::vector<WeightVector>* warm) {
    std::vector<WeightVector> out;
    const auto problems = positive_classes(class_count);
    for (std::size_t j = 0; j < problems.size(); ++j) {
        const SparseDataset ds = binary_problem(rows, class_idx, problems[j], sys.vertex_count());
        SvmConfig cfg = base;
        cfg.C = C;
        cfg.seed = base.seed + j;
        SvmResult trained = train_svm(ds, cfg);
        WeightVector w(std::move(trained.weights));
        if (warm) {
            WeightVector lifted = lift_to(sys, (*warm)[j]);
            const double lifted_obj =
                hinge_objective(lifted.values(), ds, C, cfg.positive_cost, cfg.negative_cost);
            if (lifted_obj < trained.objective) w = std::move(lifted);
        }
        out.push_back(std::move(w));
    }
    return out;
}

struct Prepared {
    std::vector<int> classes;
    std::vector<std::size_t> class_idx;
    AffineTransform transform;
    std::vector<Point> points;
};

Prepared prepare(const LabeledDataset& data, const NestedSystem& sys, double padding) {
    data.validate();
    if (data.size() == 0) throw DataError("cannot fit a model on an empty dataset");
    Prepared p;
    p.classes = data.classes();
    p.class_idx = class_index_of(data.labels, p.classes);
    p.transform = fit_transform_to_simplex(data, sys.root().simplex, padding);
    p.points.reserve(data.size());
    for (const auto& x : data.points) p.points.push_back(p.transform.apply(x));
    return p;
}

Model assemble(NestedSystem sys, std::vector<WeightVector> weights, Prepared& p, double C,
               int stages, std::size_t data_splits) {
    return Model{std::move(sys), std::move(weights), std::move(p.transform), std::move(p.classes),
                 stages, data_splits, C};
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<int> LabeledDataset::classes() const {
    std::set<int> s(labels.begin(), labels.end());
    return {s.begin(), s.end()};
}

void LabeledDataset::validate() const {
    if (labels.size() != points.size()) throw DataError("dataset has mismatched point and label counts");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != static_cast<Eigen::Index>(dim))
            throw DataError("point " + std::to_string(i) + " has dimension " +
                            std::to_string(points[i].size()) + ", expected " + std::to_string(dim));
        if (!points[i].allFinite()) throw DataError("point " + std::to_string(i) + " is not finite");
    }
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
    LabeledDataset out;
    out.dim = dim;
    out.points.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (std::size_t i : indices) {
        out.points.push_back(points.at(i));
        out.labels.push_back(labels.at(i));
    }
    return out;
}

AffineTransform fit_transform_to_simplex(const LabeledDataset& data, const Simplex& root, double padding) {
    if (data.size() == 0) throw DataError("cannot fit a transform to an empty dataset");
    if (!(padding > 0.0 && padding < 1.0)) throw DomainError("padding must lie in (0, 1)");
    data.validate();
    const auto d = static_cast<Eigen::Index>(root.dim());
    if (static_cast<Eigen::Index>(data.dim) != d)
        throw DataError("data dimension does not match the root simplex");

    Point mean = Point::Zero(d);
    for (const auto& x : data.points) mean += x;
    mean /= static_cast<double>(data.size());
    double radius = 0.0;
    for (const auto& x : data.points) radius = std::max(radius, (x - mean).norm());

    // Inradius: distance from the barycenter to the nearest facet.
    const auto& inv = root.inverse();
    double inradius = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i <= d; ++i)
        inradius = std::min(inradius, (1.0 / static_cast<double>(d + 1)) / inv.row(i).head(d).norm());

    AffineTransform t;
    t.source = mean;
    t.target = barycenter(root);
    t.scale = radius > 0.0 ? padding * inradius / radius : 1.0;
    return t;
}

Point Model::to_root(const Point& x) const {
    Point y = transform.apply(x);
    const Simplex& root = system.root().simplex;
    const Eigen::VectorXd alpha = root.barycentric(y);
    if (alpha.minCoeff() >= 0.0) return y;
    // Along b + t (y - b) each coefficient is (1-t)/(d+1) + t alpha_i.
    const double uniform = 1.0 / static_cast<double>(alpha.size());
    double t = 1.0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        if (alpha[i] < 0.0) t = std::min(t, uniform / (uniform - alpha[i]));
    const Point b = barycenter(root);
    return b + t * (y - b);
}

std::vector<double> Model::decision_values(const Point& x) const {
    return decisions_for(system.embed(to_root(x)), weights);
}

int Model::predict(const Point& x) const {
    if (classes.empty()) throw DomainError("model has no classes");
    if (classes.size() == 1) return classes[0];
    return choose_class(decision_values(x), classes);
}

std::size_t default_min_misclassified(std::size_t n) {
    const auto half_percent = static_cast<std::size_t>(std::ceil(0.005 * static_cast<double>(n)));
    return std::max<std::size_t>(2, half_percent);
}

Model fit_uniform(const LabeledDataset& data, int q, double C, const FitOptions& options) {
    if (q < 0) throw DomainError("stage count q must be non-negative");
    NestedSystem sys = NestedSystem::regular(data.dim);
    Prepared p = prepare(data, sys, options.padding);

    int stages = 0;
    for (int s = 1; s <= q; ++s) {
        std::set<NodeId> occupied;
        for (const auto& x : p.points) occupied.insert(sys.locate(x));
        for (NodeId leaf : occupied) sys.split(leaf, barycenter(sys.node(leaf).simplex));
        if (!occupied.empty()) ++stages;
    }

    std::vector<WeightVector> weights;
    if (p.classes.size() > 1) {
        const auto rows = embed_all(sys, p.points);
        weights = train_classes(sys, rows, p.class_idx, p.classes.size(), C, options.svm, nullptr);
    }
    return assemble(std::move(sys), std::move(weights), p, C, stages, 0);
}

Model fit_adaptive(const LabeledDataset& data, int q_max, double C, std::size_t min_misclassified,
                   const FitOptions& options) {
    if (q_max < 0 || q_max > kMaxAdaptiveStages)
        throw DomainError("adaptive stage bound must lie in [0, " + std::to_string(kMaxAdaptiveStages) + "]");
    if (min_misclassified == 0) min_misclassified = default_min_misclassified(data.size());

    NestedSystem sys = NestedSystem::regular(data.dim);
    Prepared p = prepare(data, sys, options.padding);
    if (p.classes.size() < 2) return assemble(std::move(sys), {}, p, C, 0, 0);

    auto rows = embed_all(sys, p.points);
    std::vector<WeightVector> weights =
        train_classes(sys, rows, p.class_idx, p.classes.size(), C, options.svm, nullptr);

    int stages = 0;
    std::size_t data_splits = 0;
    for (int s = 1; s <= q_max; ++s) {
        std::map<NodeId, std::vector<std::size_t>> members;
        std::map<NodeId, std::vector<std::size_t>> wrong;
        for (std::size_t i = 0; i < p.points.size(); ++i) {
            const NodeId leaf = sys.locate(p.points[i]);
            members[leaf].push_back(i);
            const int predicted = choose_class(decisions_for(rows[i], weights), p.classes);
            if (predicted != data.labels[i]) wrong[leaf].push_back(i);
        }
        if (wrong.empty()) break;

        struct Planned {
            NodeId leaf;
            Point point;
            bool from_data;
        };
        std::vector<Planned> plan;
        for (const auto& [leaf, mis] : wrong) {
            if (mis.size() < min_misclassified) continue;
            const Simplex& cell = sys.node(leaf).simplex;
            Point mean = Point::Zero(static_cast<Eigen::Index>(data.dim));
            for (std::size_t i : mis) mean += p.points[i];
            mean /= static_cast<double>(mis.size());

            // Distinct candidate points in the leaf; too few means fall back.
            const auto& in_leaf = members[leaf];
            std::size_t nearest = in_leaf.front();
            double best = std::numeric_limits<double>::infinity();
            std::vector<Point> distinct;
            for (std::size_t i : in_leaf) {
                const Point& x = p.points[i];
                if (distinct.size() < 2 &&
                    std::none_of(distinct.begin(), distinct.end(), [&](const Point& y) { return y == x; }))
                    distinct.push_back(x);
                const double dist = (x - mean).squaredNorm();
                if (dist < best) {
                    best = dist;
                    nearest = i;
                }
            }
            if (distinct.size() < 2)
                plan.push_back({leaf, barycenter(cell), false});
            else
                plan.push_back({leaf, nudge_interior(cell, p.points[nearest]), true});
        }
        if (plan.empty()) break;

        for (const auto& step : plan) {
            sys.split(step.leaf, step.point);
            if (step.from_data) ++data_splits;
        }
        ++stages;
        rows = embed_all(sys, p.points);
        weights = train_classes(sys, rows, p.class_idx, p.classes.size(), C, options.svm, &weights);
    }
    return assemble(std::move(sys), std::move(weights), p, C, stages, data_splits);
}

Model fit(const LabeledDataset& data, const FitOptions& options) {
    if (options.strategy == Strategy::Adaptive)
        return fit_adaptive(data, std::min(options.q, kMaxAdaptiveStages), options.C,
                            options.min_misclassified, options);
    return fit_uniform(data, options.q, options.C, options);
}

double accuracy(const Model& model, const LabeledDataset& data) {
    if (data.size() == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (model.predict(data.points[i]) == data.labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

double training_objective(const Model& model, const LabeledDataset& data) {
    if (model.classes.size() < 2) return 0.0;
    std::vector<SparseEmbedding> rows;
    rows.reserve(data.size());
    for (const auto& x : data.points) rows.push_back(model.system.embed(model.to_root(x)));
    const auto idx = class_index_of(data.labels, model.classes);
    const auto problems = positive_classes(model.classes.size());
    double total = 0.0;
    for (std::size_t j = 0; j < problems.size(); ++j) {
        const SparseDataset ds = binary_problem(rows, idx, problems[j], model.system.vertex_count());
        total += hinge_objective(model.weights[j].values(), ds, model.C);
    }
    return total;
}

// ---------------------------------------------------------------------------

std::vector<double> CvConfig::default_C_grid() {
    std::vector<double> grid;
    for (int e = -5; e <= 15; e += 2) grid.push_back(std::ldexp(1.0, e));
    return grid;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds,
                                                       std::uint64_t seed) {
    if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
    if (static_cast<std::size_t>(folds) > labels.size())
        throw DomainError("more folds than samples");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(folds));
    std::size_t cursor = 0;
    for (auto& [label, idx] : by_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) out[cursor++ % out.size()].push_back(i);
    }
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

CvResult cross_validate(const LabeledDataset& data, const CvConfig& cfg, const FitOptions& base,
                        std::size_t threads) {
    if (cfg.C_grid.empty() || cfg.q_grid.empty()) throw DomainError("cross-validation grids must be non-empty");
    const std::size_t class_count = data.classes().size();

    // Resample when some training split would lose a class entirely.
    std::vector<std::vector<std::size_t>> folds;
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
        folds = stratified_folds(data.labels, cfg.folds, cfg.seed + attempt);
        bool ok = true;
        for (std::size_t f = 0; f < folds.size() && ok && class_count > 1; ++f) {
            std::set<int> seen;
            for (std::size_t g = 0; g < folds.size(); ++g)
                if (g != f)
                    for (std::size_t i : folds[g]) seen.insert(data.labels[i]);
            ok = seen.size() > 1;
        }
        if (ok) break;
    }

    std::vector<CvCell> cells;
    for (int q : cfg.q_grid)
        for (double C : cfg.C_grid) cells.push_back(CvCell{C, q, 0.0, std::vector<double>(folds.size(), 0.0)});

    const std::size_t tasks = cells.size() * folds.size();
    parallel_for(
        tasks,
        [&](std::size_t t) {
            CvCell& cell = cells[t / folds.size()];
            const std::size_t f = t % folds.size();
            std::vector<std::size_t> train_idx;
            for (std::size_t g = 0; g < folds.size(); ++g)
                if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
            std::sort(train_idx.begin(), train_idx.end());
            FitOptions opt = base;
            opt.C = cell.C;
            opt.q = cell.q;
            const Model m = fit(data.subset(train_idx), opt);
            cell.fold_accuracy[f] = accuracy(m, data.subset(folds[f]));
        },
        threads);

    CvResult result;
    bool first = true;
    std::vector<std::size_t> order(cells.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cells[a].q != cells[b].q) return cells[a].q < cells[b].q;
        return cells[a].C < cells[b].C;
    });
    for (auto& cell : cells)
        cell.mean_accuracy = std::accumulate(cell.fold_accuracy.begin(), cell.fold_accuracy.end(), 0.0) /
                             static_cast<double>(cell.fold_accuracy.size());
    for (std::size_t i : order) {
        const CvCell& cell = cells[i];
        if (first || cell.mean_accuracy > result.best_accuracy + 1e-12) {
            result.best_accuracy = cell.mean_accuracy;
            result.best_C = cell.C;
            result.best_q = cell.q;
            first = false;
        }
    }
    result.cells = std::move(cells);
    return result;
}

// ---------------------------------------------------------------------------

double polytope_signed_distance(const std::vector<Halfspace>& halfspaces, const Point& x) {
    if (halfspaces.empty()) return std::numeric_limits<double>::infinity();
    double depth = std::numeric_limits<double>::infinity();
    for (const auto& h : halfspaces) depth = std::min(depth, h.normal.dot(x) + h.offset);
    if (depth >= 0.0) return depth;

    // Dykstra's alternating projections onto the halfspaces converge to the
    // Euclidean projection onto their intersection.
    Point y = x;
    std::vector<Point> corrections(halfspaces.size(), Point::Zero(x.size()));
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double moved = 0.0;
        for (std::size_t j = 0; j < halfspaces.size(); ++j) {
            const Point z = y + corrections[j];
            const double g = halfspaces[j].normal.dot(z) + halfspaces[j].offset;
            Point projected = g >= 0.0 ? z : Point(z - g * halfspaces[j].normal);
            corrections[j] = z - projected;
            moved = std::max(moved, (projected - y).lpNorm<Eigen::Infinity>());
            y = std::move(projected);
        }
        if (moved < 1e-14) break;
    }
    return -(x - y).norm();
}

PolytopeDataset label_by_polytope(const std::vector<Point>& points, std::vector<Halfspace> halfspaces,
                                  double margin) {
    if (!(margin >= 0.0)) throw DomainError("margin must be non-negative");
    PolytopeDataset out;
    out.data.dim = points.empty() ? 0 : static_cast<std::size_t>(points.front().size());
    for (const auto& x : points) {
        const double s = polytope_signed_distance(halfspaces, x);
        if (std::abs(s) < margin) {
            ++out.discarded;
            continue;
        }
        out.data.points.push_back(x);
        out.data.labels.push_back(s >= 0.0 ? 1 : -1);
    }
    out.halfspaces = std::move(halfspaces);
    return out;
}

PolytopeDataset generate_polytope_dataset(std::size_t n, std::size_t d, std::size_t n_halfspaces,
                                          double margin, std::uint64_t seed) {
    if (n == 0) throw DomainError("dataset size must be at least 1");
    if (d == 0) throw DomainError("dimension must be at least 1");
    if (!(margin >= 0.0)) throw DomainError("margin must be non-negative");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> offset(0.05, 0.95);
    const auto dim = static_cast<Eigen::Index>(d);

    auto sphere = [&] {
        Point g(dim);
        do {
            for (Eigen::Index i = 0; i < dim; ++i) g[i] = gauss(rng);
        } while (g.norm() == 0.0);
        return Point(g / g.norm());
    };

    std::vector<Point> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        points.push_back(sphere() * std::pow(unit(rng), 1.0 / static_cast<double>(d)));

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<Halfspace> hs;
        for (std::size_t j = 0; j < n_halfspaces; ++j) {
            const Point w = sphere();
            hs.push_back(Halfspace{-w, offset(rng)});
        }
        PolytopeDataset out = label_by_polytope(points, std::move(hs), margin);
        const bool has_positive =
            std::find(out.data.labels.begin(), out.data.labels.end(), 1) != out.data.labels.end();
        if (has_positive || n_halfspaces == 0) {
            out.data.dim = d;
            return out;
        }
    }
    throw NumericalError("could not sample a polytope containing any kept point");
}

}  // namespace nbcs
