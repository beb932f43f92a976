#include "geometry/polytope.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <stdexcept>

namespace supenv::geometry {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

double segment_distance(const Point& p, const Point& a, const Point& b) {
    double dx = b[0] - a[0], dy = b[1] - a[1];
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

void require_dim(int dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("polytope dimension must be 1 or 2");
}

}  // namespace

Polytope Polytope::empty(int dim) {
    require_dim(dim);
    return Polytope(dim, {});
}

Polytope Polytope::interval(double a, double b) {
    if (!(a <= b)) throw std::invalid_argument("interval needs a <= b");
    Point pa, pb;
    pa[0] = a;
    pb[0] = b;
    if (a == b) return Polytope(1, {pa});
    return Polytope(1, {pa, pb});
}

Polytope Polytope::polygon(std::vector<Point> ccw_vertices) { return Polytope(2, std::move(ccw_vertices)); }

double Polytope::lower() const {
    if (dim_ != 1 || vertices_.empty()) throw std::logic_error("lower() needs a non-empty interval");
    return vertices_.front()[0];
}

double Polytope::upper() const {
    if (dim_ != 1 || vertices_.empty()) throw std::logic_error("upper() needs a non-empty interval");
    return vertices_.back()[0];
}

Polytope convex_hull(std::span<const Point> points, int dim) {
    require_dim(dim);
    if (points.empty()) return Polytope::empty(dim);

    if (dim == 1) {
        auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                            [](const Point& a, const Point& b) { return a[0] < b[0]; });
        return Polytope::interval((*lo)[0], (*hi)[0]);
    }

    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() == 1) return Polytope::polygon(std::move(pts));

    double min_y = pts.front()[1], max_y = pts.front()[1];
    for (const auto& p : pts) {
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
    }
    const double scale = std::max({pts.back()[0] - pts.front()[0], max_y - min_y, 1e-300});
    const double eps = kCollinearTolerance * scale * scale;

    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= eps) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= eps) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    // Collinear input collapses to the two endpoints, possibly duplicated.
    if (hull.size() == 2 && hull[0] == hull[1]) hull.resize(1);
    return Polytope::polygon(std::move(hull));
}

bool contains(const Polytope& poly, const Point& p, double tol) {
    if (poly.is_empty()) return false;
    auto v = poly.vertices();
    if (poly.dim() == 1) return v.front()[0] - tol <= p[0] && p[0] <= v.back()[0] + tol;

    if (v.size() == 1) return std::hypot(p[0] - v[0][0], p[1] - v[0][1]) <= tol;
    if (v.size() == 2) return segment_distance(p, v[0], v[1]) <= tol;

    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % v.size()];
        double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        double signed_dist = cross(a, b, p) / len;
        if (signed_dist < -tol) return false;
        worst = std::min(worst, signed_dist);
    }
    if (worst >= 0) return true;
    // Inside the tol-inflated half-planes but outside the polygon: measure the
    // true distance so corners are not over-inflated.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i)
        best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
    return best <= tol;
}

SampledFunction lower_hull_epigraph(const SampledFunction& f) {
    const BoxGrid& grid = f.grid();
    if (grid.dim() != 1) throw std::invalid_argument("lower_hull_epigraph supports dimension 1 only");

    std::vector<Point> hull;
    hull.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].is_infinite()) continue;
        Point p;
        p[0] = grid.node(i)[0];
        p[1] = f[i].value();
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
        hull.push_back(p);
    }
    if (hull.empty()) throw std::invalid_argument("lower_hull_epigraph: every sample is +inf");

    std::vector<ExtendedValue> out(f.size(), kInfinity);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double x = grid.node(i)[0];
        if (x < hull.front()[0] || x > hull.back()[0]) continue;
        while (seg + 1 < hull.size() && hull[seg + 1][0] < x) ++seg;
        double value;
        if (seg + 1 == hull.size() || x == hull[seg][0]) {
            value = hull[seg][1];
        } else if (x == hull[seg + 1][0]) {
            value = hull[seg + 1][1];
        } else {
            const Point& a = hull[seg];
            const Point& b = hull[seg + 1];
            double t = (x - a[0]) / (b[0] - a[0]);
            value = a[1] + t * (b[1] - a[1]);
        }
        // Chord rounding must not lift the envelope above a finite sample.
        if (f[i].is_finite()) value = std::min(value, f[i].value());
        out[i] = ExtendedValue::finite(value);
    }
    return SampledFunction(grid, std::move(out));
}

}  // namespace supenv::geometry
