#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nbcs/geometry.hpp"
#include "nbcs/nested_system.hpp"

namespace nbcs {

// Planar convex-body approximation by uniform barycentric subdivision with
// greedily chosen minimal weights. The approximating region is
// {x : w . phi(x) >= 0}; it contains the target at every stage from 1 on and
// only shrinks from stage to stage.

struct ApproxConfig {
    int stages = 4;
    /// Convex, counter-clockwise, strictly inside the unit regular triangle
    /// returned by regular_simplex(2).
    Polygon2D target;
    int max_stages = 8;
    /// When set, stop at the first stage whose error ratio is at most epsilon
    /// (or at max_stages); `stages` is ignored.
    std::optional<double> epsilon;
};

struct StageMetrics {
    int stage = 0;
    std::size_t leaves = 0;
    double max_diameter = 0.0;
    double region_area = 0.0;  ///< area of the approximating region
    double error_area = 0.0;   ///< area(region \ target)
    double error_ratio = 0.0;  ///< error_area / area(root)
    /// Minimum decision value over every vertex of target clipped to every leaf.
    double containment_margin = 0.0;
    bool contains_target = true;
};

struct StageSnapshot {
    NestedSystem system;
    WeightVector weights;
};

struct ApproxResult {
    /// Snapshot per stage, index 0 being the unsplit root with weights -1.
    std::vector<StageSnapshot> snapshots;
    std::vector<StageMetrics> stages;

    const NestedSystem& system() const { return snapshots.back().system; }
    const WeightVector& weights() const { return snapshots.back().weights; }
};

/// Regular pentagon centred in the root triangle; the default CLI target.
Polygon2D builtin_pentagon();

/// Runs the staged construction. Stage 0 has no split points; its region is
/// reported as the whole root (no information yet), although the stored
/// weights are all -1. Throws DomainError if the target is not strictly
/// inside the root or is not a proper polygon.
ApproxResult approximate(const ApproxConfig& cfg);

/// Smallest weight for the vertex that split `parent` such that every point
/// of target inside the parent keeps a non-negative decision value. `w`
/// covers the vertices created before the split. Returns nullopt when the
/// target does not constrain the new weight.
std::optional<double> minimal_weight(const NestedSystem& sys, NodeId parent, const Polygon2D& target,
                                     const WeightVector& w);

/// The part of one leaf where the decision value is non-negative. Empty for
/// leaves touching an excluded vertex.
Polygon2D leaf_region(const NestedSystem& sys, const WeightVector& w, NodeId leaf);

/// Exact area of {x in root : w . phi(x) >= 0}; d = 2 only.
double region_area(const NestedSystem& sys, const WeightVector& w);

/// Exact area of the region minus the (convex) target; d = 2 only.
double region_error_area(const NestedSystem& sys, const WeightVector& w, const Polygon2D& target);

/// Minimum decision value over every vertex of target clipped to every leaf,
/// evaluated with that leaf's affine piece. -infinity if the target meets an
/// excluded leaf; +infinity if the target misses the root.
double containment_margin(const NestedSystem& sys, const WeightVector& w, const Polygon2D& target);

struct VolumeEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo volume of the region, sampling uniformly in the root (any d).
VolumeEstimate sampled_region_volume(const NestedSystem& sys, const WeightVector& w,
                                     std::size_t n_samples, std::uint64_t seed);

}  // namespace nbcs
