#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nbcs {

using Point = Eigen::VectorXd;
using Vector2 = Eigen::Vector2d;

/// Coefficients may dip this far below zero and still count as inside.
inline constexpr double kContainmentTol = 1e-9;

/// Relative determinant threshold below which a simplex is rejected as
/// degenerate. Measured against the Hadamard bound of the augmented matrix.
inline constexpr double kDegeneracyTol = 1e-12;

/// A d-simplex with its vertex coordinates and the cached inverse of the
/// augmented matrix Q = [q_0 ... q_d; 1 ... 1]. Immutable once built.
class Simplex {
public:
    /// `vertices` holds one vertex per column (d rows, d+1 columns).
    /// Throws NumericalError if the vertices are affinely dependent.
    Simplex(std::vector<std::size_t> vertex_ids, Eigen::MatrixXd vertices);

    /// Convenience constructor that numbers the vertices 0..d.
    static Simplex from_points(std::span<const Point> points);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(vertices_.rows()); }
    std::size_t vertex_count() const noexcept { return ids_.size(); }
    std::span<const std::size_t> vertex_ids() const noexcept { return ids_; }
    const Eigen::MatrixXd& vertices() const noexcept { return vertices_; }
    Point vertex(std::size_t i) const { return vertices_.col(static_cast<Eigen::Index>(i)); }
    const Eigen::MatrixXd& inverse() const noexcept { return inverse_; }
    double determinant() const noexcept { return det_; }

    /// Barycentric coefficients of x (length d+1). O(d^2) using the cached inverse.
    Eigen::VectorXd barycentric(const Point& x) const;

private:
    std::vector<std::size_t> ids_;
    Eigen::MatrixXd vertices_;
    Eigen::MatrixXd inverse_;
    double det_ = 0.0;
};

/// Unit-side regular simplex in R^d, first vertex at the origin.
Simplex regular_simplex(std::size_t d);

/// Volume of the unit-side regular simplex, sqrt(d+1) / (d! sqrt(2^d)).
double regular_simplex_volume(std::size_t d);

Eigen::VectorXd barycentric_coords(const Simplex& s, const Point& x);
bool contains(const Simplex& s, const Point& x, double tol = kContainmentTol);
Point barycenter(const Simplex& s);
double diameter(const Simplex& s);
/// |det| of the edge matrix divided by d!.
double volume(const Simplex& s);

// ---------------------------------------------------------------------------
// Planar polygons (d = 2 only)

/// Convex polygon, counter-clockwise. An empty vertex list is the empty set.
struct Polygon2D {
    std::vector<Vector2> vertices;

    bool empty() const noexcept { return vertices.empty(); }
    std::size_t size() const noexcept { return vertices.size(); }
};

/// Keeps the part of p where a.x + b >= 0.
Polygon2D clip_halfplane(const Polygon2D& p, const Vector2& a, double b);

/// Intersection of p with a triangle.
Polygon2D clip_polygon(const Polygon2D& p, const Simplex& s);

/// Intersection of p with a convex counter-clockwise polygon.
Polygon2D clip_convex(const Polygon2D& p, const Polygon2D& window);

/// Unsigned shoelace area; 0 for fewer than three vertices.
double polygon_area(const Polygon2D& p);

Polygon2D triangle_polygon(const Simplex& s);

/// True when every vertex of p lies inside s with all coefficients > margin.
bool polygon_strictly_inside(const Polygon2D& p, const Simplex& s, double margin = 0.0);

}  // namespace nbcs
