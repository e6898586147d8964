#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nbcs/linear_svm.hpp"
#include "nbcs/nested_system.hpp"

namespace nbcs {

/// Points in the original feature space with integer class ids.
struct LabeledDataset {
    std::vector<Point> points;
    std::vector<int> labels;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return points.size(); }
    /// Sorted distinct labels.
    std::vector<int> classes() const;
    /// Throws DataError on inconsistent dimensions or non-finite coordinates.
    void validate() const;
    LabeledDataset subset(const std::vector<std::size_t>& indices) const;
};

/// x -> target + scale * (x - source). A similarity, so nearest neighbours and
/// means commute with it.
struct AffineTransform {
    Point source;
    double scale = 1.0;
    Point target;

    Point apply(const Point& x) const { return target + scale * (x - source); }
};

/// Maps the data's bounding ball (centred at the mean) onto the root
/// simplex's inscribed ball shrunk by `padding`. Zero-spread data maps to the
/// root barycenter.
AffineTransform fit_transform_to_simplex(const LabeledDataset& data, const Simplex& root,
                                         double padding = 0.9);

enum class Strategy { Uniform, Adaptive };

struct FitOptions {
    Strategy strategy = Strategy::Uniform;
    /// Stage count (uniform) or maximum stage count (adaptive, at most 5).
    int q = 2;
    double C = 1.0;
    /// Adaptive skip rule; 0 selects max(2, ceil(0.5% of n)).
    std::size_t min_misclassified = 0;
    double padding = 0.9;
    /// Solver settings; C is taken from the field above.
    SvmConfig svm{};
};

inline constexpr int kMaxAdaptiveStages = 5;

/// A trained NBCS classifier. For two classes there is a single weight vector
/// and classes[1] is the positive class; for more, one weight vector per
/// class (one-vs-rest). A single-class model predicts that class everywhere.
struct Model {
    NestedSystem system;
    std::vector<WeightVector> weights;
    AffineTransform transform;
    std::vector<int> classes;
    int stages_used = 0;
    /// Split points taken from the training sample (k in the compression bound).
    std::size_t data_splits = 0;
    /// Regularisation constant the weights were trained with.
    double C = 1.0;

    /// Transformed point, pulled towards the root barycenter until it lies
    /// inside the root when it falls outside.
    Point to_root(const Point& x) const;
    /// One decision value per weight vector.
    std::vector<double> decision_values(const Point& x) const;
    int predict(const Point& x) const;
};

std::size_t default_min_misclassified(std::size_t n);

Model fit_uniform(const LabeledDataset& data, int q, double C, const FitOptions& options = {});
Model fit_adaptive(const LabeledDataset& data, int q_max, double C,
                   std::size_t min_misclassified, const FitOptions& options = {});
/// Dispatches on options.strategy.
Model fit(const LabeledDataset& data, const FitOptions& options);

double accuracy(const Model& model, const LabeledDataset& data);

/// Sum over classes of the SVM objective on the model's own embedding;
/// used to compare lifted and retrained classifiers.
double training_objective(const Model& model, const LabeledDataset& data);

// ---------------------------------------------------------------------------
// Cross-validation

struct CvConfig {
    std::vector<double> C_grid = default_C_grid();
    std::vector<int> q_grid = {2, 3, 4, 5};
    int folds = 5;
    std::uint64_t seed = 1;

    /// {2^-5, 2^-3, ..., 2^15}
    static std::vector<double> default_C_grid();
};

struct CvCell {
    double C = 0.0;
    int q = 0;
    double mean_accuracy = 0.0;
    std::vector<double> fold_accuracy;
};

struct CvResult {
    double best_C = 0.0;
    int best_q = 0;
    double best_accuracy = 0.0;
    std::vector<CvCell> cells;
};

/// Stratified folds: each class is shuffled with the seed and dealt round robin.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& labels, int folds,
                                                       std::uint64_t seed);

/// Grid search over C x q, ties to the smaller q and then the smaller C.
CvResult cross_validate(const LabeledDataset& data, const CvConfig& cfg, const FitOptions& base,
                        std::size_t threads = 0);

// ---------------------------------------------------------------------------
// Synthetic polytope data

/// {x : normal . x + offset >= 0}, normal of unit length.
struct Halfspace {
    Point normal;
    double offset = 0.0;
};

/// Positive inside the intersection (distance to the boundary), negative
/// outside (Euclidean distance to the polytope).
double polytope_signed_distance(const std::vector<Halfspace>& halfspaces, const Point& x);

struct PolytopeDataset {
    LabeledDataset data;  ///< labels +1 inside, -1 outside
    std::vector<Halfspace> halfspaces;
    std::size_t discarded = 0;
};

/// Labels points against a polytope, dropping those closer than `margin` to
/// its boundary.
PolytopeDataset label_by_polytope(const std::vector<Point>& points,
                                  std::vector<Halfspace> halfspaces, double margin);

/// n points uniform in the unit ball, a random intersection of halfspaces
/// with unit normals and offsets in [0.05, 0.95], labelled with a margin band.
PolytopeDataset generate_polytope_dataset(std::size_t n, std::size_t d, std::size_t n_halfspaces,
                                          double margin, std::uint64_t seed);

}  // namespace nbcs
