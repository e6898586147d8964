#include "nbcs/nested_system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nbcs/error.hpp"

namespace nbcs {

namespace {

// Coefficients of x in child k, derived from the parent coefficients.
double child_min_coefficient(const Eigen::VectorXd& alpha, std::span<const double> beta,
                             std::size_t k) {
    const double star = alpha[static_cast<Eigen::Index>(k)] / beta[k];
    double m = star;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        if (i == k) continue;
        m = std::min(m, alpha[static_cast<Eigen::Index>(i)] - beta[i] * star);
    }
    return m;
}

constexpr double kTieTol = 1e-13;

}  // namespace

double SparseEmbedding::sum() const noexcept {
    double s = 0.0;
    for (const auto& e : entries) s += e.value;
    return s;
}

bool WeightVector::any_excluded() const noexcept {
    return std::any_of(excluded_.begin(), excluded_.end(), [](unsigned char c) { return c != 0; });
}

NestedSystem::NestedSystem(Simplex root) : dim_(root.dim()) {
    const auto ids = root.vertex_ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (ids[i] != i) throw DomainError("root simplex vertex ids must be 0..d");
    vertices_.reserve(dim_ + 1);
    for (std::size_t i = 0; i <= dim_; ++i) vertices_.push_back(root.vertex(i));
    nodes_.push_back(Node{std::move(root)});
}

NestedSystem NestedSystem::regular(std::size_t d) {
    return NestedSystem(regular_simplex(d));
}

std::vector<NodeId> NestedSystem::leaves() const {
    std::vector<NodeId> out;
    out.reserve(leaf_count_);
    for (NodeId id = 0; id < nodes_.size(); ++id)
        if (nodes_[id].is_leaf()) out.push_back(id);
    return out;
}

VertexId NestedSystem::split(NodeId leaf, const Point& p) {
    if (leaf >= nodes_.size()) throw DomainError("split target node does not exist");
    if (!nodes_[leaf].is_leaf())
        throw DomainError("split target node " + std::to_string(leaf) + " is not a leaf");
    if (p.size() != static_cast<Eigen::Index>(dim_))
        throw DomainError("split point dimension does not match system");

    const Simplex& parent = nodes_[leaf].simplex;
    const Eigen::VectorXd beta = parent.barycentric(p);
    if (beta.minCoeff() < kSplitInteriority)
        throw DomainError("split point is not strictly interior (min coefficient " +
                          std::to_string(beta.minCoeff()) + ")");

    const VertexId v = vertices_.size();
    vertices_.push_back(p);
    records_.push_back(SplitRecord{leaf, std::vector<double>(beta.data(), beta.data() + beta.size())});

    // Build the children before touching nodes_, since push_back may reallocate.
    std::vector<Node> children;
    children.reserve(dim_ + 1);
    const std::size_t depth = nodes_[leaf].depth + 1;
    for (std::size_t k = 0; k <= dim_; ++k) {
        std::vector<std::size_t> ids(parent.vertex_ids().begin(), parent.vertex_ids().end());
        ids[k] = v;
        Eigen::MatrixXd coords = parent.vertices();
        coords.col(static_cast<Eigen::Index>(k)) = p;
        children.push_back(Node{Simplex(std::move(ids), std::move(coords)), leaf, kNoNode, 0, depth});
    }
    nodes_[leaf].first_child = nodes_.size();
    nodes_[leaf].split_vertex = v;
    for (auto& c : children) nodes_.push_back(std::move(c));
    leaf_count_ += dim_;
    return v;
}

const SplitRecord& NestedSystem::split_record(VertexId v) const {
    if (v <= dim_ || v >= vertices_.size())
        throw DomainError("vertex " + std::to_string(v) + " is not a split vertex");
    return records_[v - dim_ - 1];
}

NodeId NestedSystem::locate(const Point& x, double tol, LocateStats* stats) const {
    Eigen::VectorXd alpha;
    return descend(x, tol, stats, alpha);
}

NodeId NestedSystem::descend(const Point& x, double tol, LocateStats* stats, Eigen::VectorXd& alpha) const {
    if (x.size() != static_cast<Eigen::Index>(dim_))
        throw DomainError("point dimension does not match system");
    NodeId id = 0;
    alpha = nodes_[0].simplex.barycentric(x);
    std::size_t solves = 1;
    Eigen::Index worst = 0;
    const double lowest = alpha.minCoeff(&worst);
    if (lowest < -tol) throw OutsideRootError(static_cast<std::size_t>(worst), lowest);

    while (!nodes_[id].is_leaf()) {
        const Node& n = nodes_[id];
        const auto& beta = records_[n.split_vertex - dim_ - 1].beta;
        std::size_t best = 0;
        double best_min = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k <= dim_; ++k) {
            const double m = child_min_coefficient(alpha, beta, k);
            if (m > best_min + kTieTol) {
                best_min = m;
                best = k;
            }
        }
        id = n.first_child + best;
        alpha = nodes_[id].simplex.barycentric(x);
        ++solves;
    }
    if (stats) {
        stats->solves = solves;
        stats->depth = nodes_[id].depth;
    }
    return id;
}

SparseEmbedding NestedSystem::embed(const Point& x, double tol) const {
    Eigen::VectorXd alpha;
    const NodeId leaf = descend(x, tol, nullptr, alpha);
    const Simplex& s = nodes_[leaf].simplex;
    SparseEmbedding e;
    e.entries.reserve(dim_ + 1);
    for (std::size_t i = 0; i <= dim_; ++i) {
        const double a = alpha[static_cast<Eigen::Index>(i)];
        if (std::abs(a) > kPruneTol) e.entries.push_back({s.vertex_ids()[i], a});
    }
    return e;
}

Point NestedSystem::project_back(const SparseEmbedding& e) const {
    Point x = Point::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& entry : e.entries) {
        if (entry.index >= vertices_.size())
            throw DomainError("embedding index " + std::to_string(entry.index) + " out of range");
        x += entry.value * vertices_[entry.index];
    }
    return x;
}

Point nudge_interior(const Simplex& s, const Point& p) {
    if (s.barycentric(p).minCoeff() >= kSplitInteriority) return p;
    return p + kNudgeFraction * (barycenter(s) - p);
}

double decision_value(const SparseEmbedding& e, const WeightVector& w) {
    double value = 0.0;
    for (const auto& entry : e.entries) {
        if (entry.index >= w.size()) throw DomainError("weight vector shorter than embedding index");
        if (w.excluded(entry.index)) return -std::numeric_limits<double>::infinity();
        value += entry.value * w[entry.index];
    }
    return value;
}

double decision_value(const NestedSystem& sys, const WeightVector& w, const Point& x) {
    if (w.size() != sys.vertex_count())
        throw DomainError("weight vector length " + std::to_string(w.size()) +
                          " does not match vertex count " + std::to_string(sys.vertex_count()));
    return decision_value(sys.embed(x), w);
}

WeightVector lift_weights(const NestedSystem& sys, const WeightVector& w, VertexId v) {
    if (w.size() != v)
        throw DomainError("lift_weights: weight vector has length " + std::to_string(w.size()) +
                          ", expected " + std::to_string(v));
    const SplitRecord& rec = sys.split_record(v);
    const auto ids = sys.node(rec.parent).simplex.vertex_ids();
    WeightVector out = w;
    double lifted = 0.0;
    bool excluded = false;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (w.excluded(ids[i])) {
            excluded = true;
            break;
        }
        lifted += rec.beta[i] * w[ids[i]];
    }
    if (excluded)
        out.push_excluded();
    else
        out.push_back(lifted);
    return out;
}

WeightVector lift_to(const NestedSystem& sys, WeightVector w) {
    if (w.size() > sys.vertex_count()) throw DomainError("weight vector longer than system");
    while (w.size() < sys.vertex_count()) w = lift_weights(sys, w, w.size());
    return w;
}

std::vector<double> hyperplane_weights(const Simplex& s, std::span<const Point> points) {
    const std::size_t d = s.dim();
    if (points.size() != d)
        throw DomainError("hyperplane_weights needs exactly " + std::to_string(d) + " points");
    Eigen::MatrixXd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d + 1));
    for (std::size_t r = 0; r < d; ++r) {
        const Eigen::VectorXd alpha = barycentric_coords(s, points[r]);
        if (alpha.minCoeff() < -kContainmentTol)
            throw DomainError("hyperplane point lies outside the simplex");
        a.row(static_cast<Eigen::Index>(r)) = alpha.transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv.size() < static_cast<Eigen::Index>(d) || sv[sv.size() - 1] <= 1e-10 * std::max(sv[0], 1.0))
        throw NumericalError("hyperplane points are not affinely independent");
    Eigen::VectorXd w = svd.matrixV().col(static_cast<Eigen::Index>(d));
    w.normalize();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (std::abs(w[i]) > 1e-12) {
            if (w[i] < 0) w = -w;
            break;
        }
    }
    return {w.data(), w.data() + w.size()};
}

double coefficient_recurrence_residual(const NestedSystem& sys, const Point& x, VertexId v) {
    const SplitRecord& rec = sys.split_record(v);
    const auto& parent = sys.node(rec.parent);
    const Eigen::VectorXd before = parent.simplex.barycentric(x);

    // Pick the child containing x from fresh solves in every child.
    std::size_t best = 0;
    double best_min = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd after;
    for (std::size_t k = 0; k <= sys.dim(); ++k) {
        Eigen::VectorXd a = sys.node(parent.first_child + k).simplex.barycentric(x);
        const double m = a.minCoeff();
        if (m > best_min + kTieTol) {
            best_min = m;
            best = k;
            after = std::move(a);
        }
    }
    const double star = after[static_cast<Eigen::Index>(best)];
    double residual = 0.0;
    for (std::size_t i = 0; i <= sys.dim(); ++i) {
        const double next = (i == best) ? 0.0 : after[static_cast<Eigen::Index>(i)];
        residual = std::max(residual,
                            std::abs(before[static_cast<Eigen::Index>(i)] - next - rec.beta[i] * star));
    }
    return residual;
}

}  // namespace nbcs
