#include "nbcs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nbcs/error.hpp"

namespace nbcs {

namespace {

Eigen::MatrixXd augmented(const Eigen::MatrixXd& vertices) {
    const auto d = vertices.rows();
    Eigen::MatrixXd q(d + 1, vertices.cols());
    q.topRows(d) = vertices;
    q.row(d).setOnes();
    return q;
}

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

}  // namespace

Simplex::Simplex(std::vector<std::size_t> vertex_ids, Eigen::MatrixXd vertices)
    : ids_(std::move(vertex_ids)), vertices_(std::move(vertices)) {
    const auto d = vertices_.rows();
    if (d < 1) throw DomainError("simplex dimension must be at least 1");
    if (vertices_.cols() != d + 1)
        throw DomainError("a " + std::to_string(d) + "-simplex needs " + std::to_string(d + 1) +
                          " vertices, got " + std::to_string(vertices_.cols()));
    if (ids_.size() != static_cast<std::size_t>(d + 1))
        throw DomainError("simplex vertex id count does not match its coordinates");
    if (!vertices_.allFinite()) throw DomainError("simplex vertex coordinates must be finite");

    const Eigen::MatrixXd q = augmented(vertices_);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(q);
    det_ = lu.determinant();
    double hadamard = 1.0;
    for (Eigen::Index c = 0; c < q.cols(); ++c) hadamard *= q.col(c).norm();
    if (!(std::abs(det_) > kDegeneracyTol * hadamard))
        throw NumericalError("degenerate simplex: |det Q| = " + std::to_string(std::abs(det_)));
    inverse_ = lu.inverse();
}

Simplex Simplex::from_points(std::span<const Point> points) {
    if (points.empty()) throw DomainError("simplex needs at least one vertex");
    const auto d = points.front().size();
    Eigen::MatrixXd v(d, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d) throw DomainError("simplex vertices have mixed dimensions");
        v.col(static_cast<Eigen::Index>(i)) = points[i];
    }
    std::vector<std::size_t> ids(points.size());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return Simplex(std::move(ids), std::move(v));
}

Eigen::VectorXd Simplex::barycentric(const Point& x) const {
    const auto d = vertices_.rows();
    // inverse * [x; 1] without materialising the augmented vector
    Eigen::VectorXd alpha = inverse_.col(d);
    alpha.noalias() += inverse_.leftCols(d) * x;
    return alpha;
}

Simplex regular_simplex(std::size_t d) {
    if (d == 0) throw DomainError("regular simplex requires dimension >= 1");
    const auto n = static_cast<Eigen::Index>(d);
    // Helmert basis of the hyperplane sum(x) = 0 in R^{d+1}.
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n + 1, n);
    for (Eigen::Index j = 1; j <= n; ++j) {
        const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
        basis.col(j - 1).head(j).setConstant(1.0 / norm);
        basis(j, j - 1) = -static_cast<double>(j) / norm;
    }
    // Vertices e_i / sqrt(2), translated so that vertex 0 is the origin.
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd v(n, n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
        e(i) += s;
        e(0) -= s;
        v.col(i) = basis.transpose() * e;
    }
    std::vector<std::size_t> ids(d + 1);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return Simplex(std::move(ids), std::move(v));
}

double regular_simplex_volume(std::size_t d) {
    return std::sqrt(static_cast<double>(d + 1)) /
           (factorial(d) * std::sqrt(std::pow(2.0, static_cast<double>(d))));
}

Eigen::VectorXd barycentric_coords(const Simplex& s, const Point& x) {
    if (x.size() != static_cast<Eigen::Index>(s.dim()))
        throw DomainError("point dimension does not match simplex");
    return s.barycentric(x);
}

bool contains(const Simplex& s, const Point& x, double tol) {
    return barycentric_coords(s, x).minCoeff() >= -tol;
}

Point barycenter(const Simplex& s) {
    return s.vertices().rowwise().mean();
}

double diameter(const Simplex& s) {
    const auto& v = s.vertices();
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.cols(); ++i)
        for (Eigen::Index j = i + 1; j < v.cols(); ++j)
            best = std::max(best, (v.col(i) - v.col(j)).norm());
    return best;
}

double volume(const Simplex& s) {
    const auto& v = s.vertices();
    const auto d = v.rows();
    Eigen::MatrixXd edges(d, d);
    for (Eigen::Index i = 0; i < d; ++i) edges.col(i) = v.col(i + 1) - v.col(0);
    return std::abs(edges.determinant()) / factorial(static_cast<std::size_t>(d));
}

Polygon2D clip_halfplane(const Polygon2D& p, const Vector2& a, double b) {
    Polygon2D out;
    const std::size_t n = p.size();
    if (n == 0) return out;
    out.vertices.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Vector2& cur = p.vertices[i];
        const Vector2& nxt = p.vertices[(i + 1) % n];
        const double fc = a.dot(cur) + b;
        const double fn = a.dot(nxt) + b;
        if (fc >= 0.0) out.vertices.push_back(cur);
        if ((fc > 0.0 && fn < 0.0) || (fc < 0.0 && fn > 0.0)) {
            const double t = fc / (fc - fn);
            out.vertices.push_back(cur + t * (nxt - cur));
        }
    }
    return out;
}

Polygon2D clip_polygon(const Polygon2D& p, const Simplex& s) {
    if (s.dim() != 2) throw DomainError("polygon clipping requires a 2-simplex");
    const auto& inv = s.inverse();
    Polygon2D out = p;
    for (Eigen::Index i = 0; i < 3 && !out.empty(); ++i)
        out = clip_halfplane(out, Vector2(inv(i, 0), inv(i, 1)), inv(i, 2));
    return out;
}

Polygon2D clip_convex(const Polygon2D& p, const Polygon2D& window) {
    Polygon2D out = p;
    const std::size_t n = window.size();
    for (std::size_t i = 0; i < n && !out.empty(); ++i) {
        const Vector2& a = window.vertices[i];
        const Vector2& b = window.vertices[(i + 1) % n];
        // inward normal of a counter-clockwise edge
        const Vector2 normal(-(b.y() - a.y()), b.x() - a.x());
        out = clip_halfplane(out, normal, -normal.dot(a));
    }
    return out;
}

double polygon_area(const Polygon2D& p) {
    const std::size_t n = p.size();
    if (n < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vector2& a = p.vertices[i];
        const Vector2& b = p.vertices[(i + 1) % n];
        twice += a.x() * b.y() - a.y() * b.x();
    }
    return 0.5 * std::abs(twice);
}

Polygon2D triangle_polygon(const Simplex& s) {
    if (s.dim() != 2) throw DomainError("triangle_polygon requires a 2-simplex");
    Polygon2D t;
    for (Eigen::Index i = 0; i < 3; ++i) t.vertices.emplace_back(s.vertices().col(i));
    const Vector2 e1 = t.vertices[1] - t.vertices[0];
    const Vector2 e2 = t.vertices[2] - t.vertices[0];
    if (e1.x() * e2.y() - e1.y() * e2.x() < 0.0) std::swap(t.vertices[1], t.vertices[2]);
    return t;
}

bool polygon_strictly_inside(const Polygon2D& p, const Simplex& s, double margin) {
    if (p.empty()) return false;
    return std::all_of(p.vertices.begin(), p.vertices.end(), [&](const Vector2& v) {
        return s.barycentric(Point(v)).minCoeff() > margin;
    });
}

}  // namespace nbcs
