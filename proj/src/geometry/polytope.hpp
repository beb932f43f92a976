#pragma once

#include <span>
#include <vector>

#include "core/grid.hpp"

namespace supenv::geometry {

// A closed convex set in R^1 (an interval) or R^2 (a convex polygon).
//
// In the plane the vertex list is counterclockwise with no three retained
// vertices collinear; it degenerates to a segment (2 vertices), a point (1)
// or nothing (empty).
class Polytope {
public:
    static Polytope empty(int dim);
    static Polytope interval(double a, double b);
    // Takes an already-convex CCW vertex list as produced by convex_hull.
    static Polytope polygon(std::vector<Point> ccw_vertices);

    int dim() const { return dim_; }
    bool is_empty() const { return vertices_.empty(); }
    // 1D: [a] or [a, b]; 2D: CCW vertices.
    std::span<const Point> vertices() const { return vertices_; }
    double lower() const;  // 1D only
    double upper() const;  // 1D only

    friend bool operator==(const Polytope&, const Polytope&) = default;

private:
    Polytope(int dim, std::vector<Point> vertices) : dim_(dim), vertices_(std::move(vertices)) {}
    int dim_;
    std::vector<Point> vertices_;
};

// Relative collinearity tolerance for hull construction.
inline constexpr double kCollinearTolerance = 1e-12;

// Smallest convex polytope containing `points`. In 2D this is Andrew's
// monotone chain: points sorted by x then y, vertices with a cross product
// below 1e-12 * scale^2 (scale = bounding-box extent) dropped.
Polytope convex_hull(std::span<const Point> points, int dim);

// Closed-set membership: true iff p lies within distance `tol` of P.
bool contains(const Polytope& poly, const Point& p, double tol);

// The restriction to the grid of the convex envelope of the piecewise-linear
// interpolant through the finite samples. +inf nodes get the envelope's value
// at their abscissa, or stay +inf outside the finite range. 1D only.
SampledFunction lower_hull_epigraph(const SampledFunction& f);

}  // namespace supenv::geometry
