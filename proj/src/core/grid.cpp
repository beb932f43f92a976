#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace supenv {

namespace {

void validate_axis(double lo, double hi, int nodes, int axis) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        std::ostringstream msg;
        msg << "box axis " << axis << ": need finite lo < hi, got [" << lo << ", " << hi << "]";
        throw std::invalid_argument(msg.str());
    }
    if (nodes < 2) {
        std::ostringstream msg;
        msg << "box axis " << axis << ": need at least 2 nodes, got " << nodes;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

BoxGrid::BoxGrid(double lo, double hi, int nodes) : dim_(1) {
    validate_axis(lo, hi, nodes, 0);
    lo_[0] = lo;
    hi_[0] = hi;
    nodes_[0] = nodes;
    h_[0] = (hi - lo) / (nodes - 1);
}

BoxGrid::BoxGrid(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> nodes)
    : dim_(2), lo_(lo), hi_(hi), nodes_(nodes) {
    for (int a = 0; a < 2; ++a) {
        validate_axis(lo[a], hi[a], nodes[a], a);
        h_[a] = (hi[a] - lo[a]) / (nodes[a] - 1);
    }
}

double BoxGrid::max_spacing() const { return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]); }

double BoxGrid::extent() const {
    return dim_ == 1 ? hi_[0] - lo_[0] : std::max(hi_[0] - lo_[0], hi_[1] - lo_[1]);
}

std::size_t BoxGrid::size() const {
    return dim_ == 1 ? static_cast<std::size_t>(nodes_[0])
                     : static_cast<std::size_t>(nodes_[0]) * static_cast<std::size_t>(nodes_[1]);
}

std::array<int, 2> BoxGrid::multi_index(std::size_t flat) const {
    if (dim_ == 1) return {static_cast<int>(flat), 0};
    return {static_cast<int>(flat % nodes_[0]), static_cast<int>(flat / nodes_[0])};
}

Point BoxGrid::node(std::size_t flat) const {
    auto idx = multi_index(flat);
    Point p;
    p[0] = coordinate(0, idx[0]);
    if (dim_ == 2) p[1] = coordinate(1, idx[1]);
    return p;
}

BoxGrid BoxGrid::scaled(double factor) const {
    if (!(factor >= 1.0)) throw std::invalid_argument("far-field factor must be >= 1");
    auto stretch = [factor](double lo, double hi) {
        double center = 0.5 * (lo + hi);
        double half = 0.5 * (hi - lo) * factor;
        return std::array<double, 2>{center - half, center + half};
    };
    if (dim_ == 1) {
        auto r = stretch(lo_[0], hi_[0]);
        return BoxGrid(r[0], r[1], nodes_[0]);
    }
    auto rx = stretch(lo_[0], hi_[0]);
    auto ry = stretch(lo_[1], hi_[1]);
    return BoxGrid({rx[0], ry[0]}, {rx[1], ry[1]}, nodes_);
}

SampledFunction::SampledFunction(BoxGrid grid, std::vector<ExtendedValue> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("sampled values do not match the grid node count");
}

ExtendedValue SampledFunction::min_value() const {
    ExtendedValue best = kInfinity;
    for (const auto& v : values_) best = min(best, v);
    return best;
}

double SampledFunction::value_scale() const {
    double s = 0.0;
    for (const auto& v : values_)
        if (v.is_finite()) s = std::max(s, std::abs(v.value()));
    return s;
}

bool SampledFunction::all_infinite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const ExtendedValue& v) { return v.is_infinite(); });
}

std::string to_string(const ExtendedValue& v) {
    if (v.is_infinite()) return "inf";
    std::ostringstream out;
    out.precision(17);
    out << v.value();
    return out.str();
}

}  // namespace supenv
