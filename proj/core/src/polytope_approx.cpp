#include "nbcs/polytope_approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "nbcs/error.hpp"

namespace nbcs {

namespace {

constexpr double kActiveCoefficient = 1e-12;

bool touches_excluded(const Simplex& s, const WeightVector& w) {
    for (std::size_t id : s.vertex_ids())
        if (w.excluded(id)) return true;
    return false;
}

// Decision value on a leaf's affine piece: g . x + h.
std::pair<Vector2, double> affine_piece(const Simplex& s, const WeightVector& w) {
    const auto& inv = s.inverse();
    const auto ids = s.vertex_ids();
    Vector2 g = Vector2::Zero();
    double h = 0.0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        g += w[ids[i]] * Vector2(inv(r, 0), inv(r, 1));
        h += w[ids[i]] * inv(r, 2);
    }
    return {g, h};
}

void require_planar(const NestedSystem& sys) {
    if (sys.dim() != 2) throw DomainError("exact region computations require d = 2");
}

StageMetrics measure(int stage, const NestedSystem& sys, const WeightVector& w, const Polygon2D& target,
                     double root_area, double target_area) {
    StageMetrics m;
    m.stage = stage;
    m.leaves = sys.leaf_count();
    for (NodeId leaf : sys.leaves()) m.max_diameter = std::max(m.max_diameter, diameter(sys.node(leaf).simplex));
    if (stage == 0) {
        m.region_area = root_area;
        m.error_area = root_area - target_area;
        m.containment_margin = std::numeric_limits<double>::infinity();
    } else {
        m.region_area = region_area(sys, w);
        m.error_area = region_error_area(sys, w, target);
        m.containment_margin = containment_margin(sys, w, target);
    }
    m.error_ratio = m.error_area / root_area;
    m.contains_target = m.containment_margin >= -1e-9;
    return m;
}

}  // namespace

Polygon2D builtin_pentagon() {
    const Simplex root = regular_simplex(2);
    const Point center = barycenter(root);
    constexpr double radius = 0.22;
    constexpr double phase = 0.3;
    Polygon2D p;
    for (int k = 0; k < 5; ++k) {
        const double a = phase + 2.0 * std::numbers::pi * k / 5.0;
        p.vertices.emplace_back(center[0] + radius * std::cos(a), center[1] + radius * std::sin(a));
    }
    return p;
}

std::optional<double> minimal_weight(const NestedSystem& sys, NodeId parent, const Polygon2D& target,
                                     const WeightVector& w) {
    require_planar(sys);
    const auto& node = sys.node(parent);
    if (node.is_leaf()) throw DomainError("minimal_weight: node has not been split");
    const VertexId fresh = node.split_vertex;
    if (w.size() != fresh) throw DomainError("minimal_weight: weights must cover vertices before the split");

    std::optional<double> best;
    for (std::size_t k = 0; k <= sys.dim(); ++k) {
        const Simplex& cell = sys.node(node.first_child + k).simplex;
        const Polygon2D piece = clip_polygon(target, cell);
        const auto ids = cell.vertex_ids();
        for (const auto& v : piece.vertices) {
            const Eigen::VectorXd alpha = cell.barycentric(Point(v));
            const double own = alpha[static_cast<Eigen::Index>(k)];
            if (own <= kActiveCoefficient) continue;
            double rest = 0.0;
            bool blocked = false;
            for (std::size_t i = 0; i < ids.size(); ++i) {
                if (i == k) continue;
                const double a = alpha[static_cast<Eigen::Index>(i)];
                if (w.excluded(ids[i])) {
                    if (std::abs(a) > kActiveCoefficient) blocked = true;
                    continue;
                }
                rest += a * w[ids[i]];
            }
            if (blocked)
                throw NumericalError("target meets a cell with an excluded vertex; containment impossible");
            const double ratio = -rest / own;
            if (!best || ratio > *best) best = ratio;
        }
    }
    return best;
}

ApproxResult approximate(const ApproxConfig& cfg) {
    if (cfg.max_stages < 0) throw DomainError("max_stages must be non-negative");
    if (!cfg.epsilon && (cfg.stages < 0 || cfg.stages > cfg.max_stages))
        throw DomainError("stage count must lie in [0, " + std::to_string(cfg.max_stages) + "]");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw DomainError("epsilon must be positive");

    NestedSystem sys = NestedSystem::regular(2);
    const Polygon2D& target = cfg.target;
    if (target.size() < 3 || polygon_area(target) <= 0.0)
        throw DomainError("target polygon must have positive area");
    if (!polygon_strictly_inside(target, sys.root().simplex))
        throw DomainError("target polygon must lie strictly inside the root simplex");

    const double root_area = volume(sys.root().simplex);
    const double target_area = polygon_area(target);
    WeightVector w(3, -1.0);

    ApproxResult result;
    result.stages.push_back(measure(0, sys, w, target, root_area, target_area));
    result.snapshots.push_back({sys, w});

    const int last = cfg.epsilon ? cfg.max_stages : cfg.stages;
    for (int stage = 1; stage <= last; ++stage) {
        if (cfg.epsilon && result.stages.back().error_ratio <= *cfg.epsilon) break;
        for (NodeId leaf : sys.leaves()) {
            const Simplex cell = sys.node(leaf).simplex;
            const bool disjoint = clip_polygon(target, cell).empty();
            double average = 0.0;
            bool parent_excluded = false;
            for (std::size_t id : cell.vertex_ids()) {
                parent_excluded = parent_excluded || w.excluded(id);
                average += w[id];
            }
            average /= static_cast<double>(cell.vertex_count());

            sys.split(leaf, barycenter(cell));
            if (disjoint || parent_excluded) {
                w.push_excluded();
                continue;
            }
            const std::optional<double> needed = minimal_weight(sys, leaf, target, w);
            if (!needed)
                w.push_back(average);
            else if (stage == 1)
                w.push_back(*needed);
            else
                w.push_back(std::min(*needed, average));
        }
        result.stages.push_back(measure(stage, sys, w, target, root_area, target_area));
        result.snapshots.push_back({sys, w});
    }
    return result;
}

Polygon2D leaf_region(const NestedSystem& sys, const WeightVector& w, NodeId leaf) {
    require_planar(sys);
    const Simplex& s = sys.node(leaf).simplex;
    if (touches_excluded(s, w)) return {};
    const auto [g, h] = affine_piece(s, w);
    return clip_halfplane(triangle_polygon(s), g, h);
}

double region_area(const NestedSystem& sys, const WeightVector& w) {
    require_planar(sys);
    if (w.size() != sys.vertex_count()) throw DomainError("weight vector does not match system");
    double total = 0.0;
    for (NodeId leaf : sys.leaves()) total += polygon_area(leaf_region(sys, w, leaf));
    return total;
}

double region_error_area(const NestedSystem& sys, const WeightVector& w, const Polygon2D& target) {
    require_planar(sys);
    if (w.size() != sys.vertex_count()) throw DomainError("weight vector does not match system");
    double total = 0.0;
    for (NodeId leaf : sys.leaves()) {
        const Polygon2D region = leaf_region(sys, w, leaf);
        if (region.size() < 3) continue;
        total += polygon_area(region) - polygon_area(clip_convex(region, target));
    }
    return std::max(total, 0.0);
}

double containment_margin(const NestedSystem& sys, const WeightVector& w, const Polygon2D& target) {
    require_planar(sys);
    double margin = std::numeric_limits<double>::infinity();
    for (NodeId leaf : sys.leaves()) {
        const Simplex& s = sys.node(leaf).simplex;
        const Polygon2D piece = clip_polygon(target, s);
        if (piece.empty()) continue;
        if (touches_excluded(s, w)) return -std::numeric_limits<double>::infinity();
        const auto [g, h] = affine_piece(s, w);
        for (const auto& v : piece.vertices) margin = std::min(margin, g.dot(v) + h);
    }
    return margin;
}

VolumeEstimate sampled_region_volume(const NestedSystem& sys, const WeightVector& w, std::size_t n_samples,
                                     std::uint64_t seed) {
    if (n_samples == 0) throw DomainError("need at least one sample");
    const Simplex& root = sys.root().simplex;
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> expo(1.0);
    const auto k = static_cast<Eigen::Index>(root.vertex_count());
    std::size_t hits = 0;
    Eigen::VectorXd weights(k);
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (Eigen::Index i = 0; i < k; ++i) weights[i] = expo(rng);
        weights /= weights.sum();
        const Point x = root.vertices() * weights;
        if (decision_value(sys, w, x) >= 0.0) ++hits;
    }
    const double vol = volume(root);
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    return {p * vol, vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples))};
}

}  // namespace nbcs
