#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "nbcs/geometry.hpp"

namespace nbcs {

using NodeId = std::size_t;
using VertexId = std::size_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Split points must have every coefficient at least this large in their leaf.
inline constexpr double kSplitInteriority = 1e-6;
/// Fraction of the way towards the barycenter that nudge_interior moves a point.
inline constexpr double kNudgeFraction = 1e-3;
/// Embedding coefficients with magnitude at or below this are dropped.
inline constexpr double kPruneTol = 1e-12;

struct EmbeddingEntry {
    VertexId index;
    double value;
};

/// Image of a point under the nested barycentric map: at most d+1 nonzero
/// (vertex, coefficient) pairs summing to one.
struct SparseEmbedding {
    std::vector<EmbeddingEntry> entries;

    double sum() const noexcept;
    std::size_t size() const noexcept { return entries.size(); }
};

/// Coefficients of a split vertex over the d+1 vertices of the leaf it split.
struct SplitRecord {
    NodeId parent = kNoNode;
    std::vector<double> beta;
};

/// One weight per global vertex. An excluded vertex stands for weight -infinity:
/// any point whose leaf touches it is classified negative.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::size_t n, double value = 0.0) : weights_(n, value), excluded_(n, 0) {}
    explicit WeightVector(std::vector<double> weights)
        : weights_(std::move(weights)), excluded_(weights_.size(), 0) {}

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    double& operator[](std::size_t i) { return weights_[i]; }
    bool excluded(std::size_t i) const { return excluded_[i] != 0; }
    void set_excluded(std::size_t i, bool flag = true) { excluded_[i] = flag ? 1 : 0; }
    bool any_excluded() const noexcept;

    void push_back(double w) {
        weights_.push_back(w);
        excluded_.push_back(0);
    }
    void push_excluded() {
        weights_.push_back(0.0);
        excluded_.push_back(1);
    }

    std::span<const double> values() const noexcept { return weights_; }
    std::span<double> values() noexcept { return weights_; }

private:
    std::vector<double> weights_;
    std::vector<unsigned char> excluded_;
};

struct LocateStats {
    std::size_t solves = 0;  ///< barycentric solves performed (root + one per level)
    std::size_t depth = 0;   ///< depth of the returned leaf, root = 0
};

/// The nested barycentric coordinate system: an append-only vertex list
/// q_0..q_t and a (d+1)-ary tree of simplices. Child k of a split node
/// replaces parent vertex k with the split vertex.
///
/// Built by a single writer through split(); all const members are safe to
/// call concurrently once construction is finished.
class NestedSystem {
public:
    struct Node {
        Simplex simplex;
        NodeId parent = kNoNode;
        NodeId first_child = kNoNode;
        VertexId split_vertex = 0;
        std::size_t depth = 0;

        bool is_leaf() const noexcept { return first_child == kNoNode; }
    };

    /// The root's vertex ids must be 0..d.
    explicit NestedSystem(Simplex root);
    static NestedSystem regular(std::size_t d);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    const Point& vertex(VertexId v) const { return vertices_.at(v); }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    const Node& root() const noexcept { return nodes_.front(); }
    std::vector<NodeId> leaves() const;
    std::size_t leaf_count() const noexcept { return leaf_count_; }
    std::size_t split_count() const noexcept { return records_.size(); }

    /// Splits a leaf at an interior point and returns the new vertex id.
    /// Throws DomainError if `leaf` has children or p is not interior.
    VertexId split(NodeId leaf, const Point& p);

    /// Record of a split vertex (ids d+1 and above).
    const SplitRecord& split_record(VertexId v) const;

    /// Descends from the root to the leaf containing x. At each level the
    /// child with the largest minimum coefficient wins, ties to the lowest
    /// child index. Throws OutsideRootError if x is outside the root by more
    /// than tol.
    NodeId locate(const Point& x, double tol = kContainmentTol, LocateStats* stats = nullptr) const;

    SparseEmbedding embed(const Point& x, double tol = kContainmentTol) const;
    Point project_back(const SparseEmbedding& e) const;

private:
    NodeId descend(const Point& x, double tol, LocateStats* stats, Eigen::VectorXd& alpha) const;

    std::size_t dim_;
    std::vector<Point> vertices_;
    std::vector<Node> nodes_;
    std::vector<SplitRecord> records_;
    std::size_t leaf_count_ = 1;
};

/// Moves p a fraction kNudgeFraction towards the barycenter of s when any of
/// its coefficients is below kSplitInteriority; otherwise returns p.
Point nudge_interior(const Simplex& s, const Point& p);

/// w . phi(x), or -infinity when the embedding touches an excluded vertex.
double decision_value(const SparseEmbedding& e, const WeightVector& w);
double decision_value(const NestedSystem& sys, const WeightVector& w, const Point& x);

/// Extends a weight vector defined on vertices 0..v-1 to vertex v by giving
/// it the beta-weighted average of its parent's weights. The decision
/// function is unchanged pointwise.
WeightVector lift_weights(const NestedSystem& sys, const WeightVector& w, VertexId v);

/// Applies lift_weights until w covers every vertex of sys.
WeightVector lift_to(const NestedSystem& sys, WeightVector w);

/// Weights over s's d+1 vertices whose zero set is the hyperplane through
/// the d given points. Unit norm, first nonzero entry positive.
std::vector<double> hyperplane_weights(const Simplex& s, std::span<const Point> points);

/// max_i |alpha_{i,t}(x) - alpha_{i,t+1}(x) - beta_i alpha*(x)| for the split
/// that created vertex v. x must lie in the simplex that was split.
double coefficient_recurrence_residual(const NestedSystem& sys, const Point& x, VertexId v);

}  // namespace nbcs
