#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "core/extended.hpp"

namespace supenv {

// A point in R^1 or R^2; unused coordinates stay zero.
struct Point {
    std::array<double, 2> c{0.0, 0.0};
    double operator[](std::size_t i) const { return c[i]; }
    double& operator[](std::size_t i) { return c[i]; }
    friend bool operator==(const Point&, const Point&) = default;
};

// Axis-aligned box with a uniform node lattice, endpoints included.
// Flat node index is ix + nx * iy (x runs fastest).
class BoxGrid {
public:
    BoxGrid(double lo, double hi, int nodes);
    BoxGrid(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> nodes);

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    int nodes(int axis) const { return nodes_[axis]; }
    double spacing(int axis) const { return h_[axis]; }
    double max_spacing() const;
    // Largest box side, the length scale for geometric tolerances.
    double extent() const;
    std::size_t size() const;

    // lo + i * h, bit-reproducible.
    double coordinate(int axis, int i) const { return lo_[axis] + i * h_[axis]; }
    Point node(std::size_t flat) const;
    std::array<int, 2> multi_index(std::size_t flat) const;
    std::size_t flat_index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(ix) + static_cast<std::size_t>(nodes_[0]) * iy;
    }

    // Concentric copy scaled by `factor` about the box center, same node counts.
    BoxGrid scaled(double factor) const;

    friend bool operator==(const BoxGrid&, const BoxGrid&) = default;

private:
    int dim_;
    std::array<double, 2> lo_{0, 0}, hi_{0, 0}, h_{0, 0};
    std::array<int, 2> nodes_{1, 1};
};

class SampledFunction {
public:
    SampledFunction(BoxGrid grid, std::vector<ExtendedValue> values);

    const BoxGrid& grid() const { return grid_; }
    std::span<const ExtendedValue> values() const { return values_; }
    const ExtendedValue& operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    // Smallest value over all nodes (+inf if every node is +inf).
    ExtendedValue min_value() const;
    // Largest |v| over finite nodes, 0 if none.
    double value_scale() const;
    bool all_infinite() const;

private:
    BoxGrid grid_;
    std::vector<ExtendedValue> values_;
};

// 1e-9 * (1 + scale): the float-noise band for value comparisons.
inline double value_tolerance(double scale) { return 1e-9 * (1.0 + scale); }

}  // namespace supenv
