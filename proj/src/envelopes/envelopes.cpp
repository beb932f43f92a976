#include "envelopes/envelopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "core/parallel.hpp"

namespace supenv::envelopes {

using geometry::Polytope;

namespace {

void require_same_dim(const FunctionSpec& f, const BoxGrid& grid) {
    if (f.dim() != grid.dim())
        throw std::invalid_argument("function '" + f.name() + "' does not match the grid dimension");
}

void validate(const EnvelopeOptions& o) {
    if (o.refine_depth < 0 || o.refine_depth > 8) throw std::invalid_argument("refine_depth must be in [0, 8]");
    if (o.approach_depth != 0 && (o.approach_depth < o.refine_depth + 2 || o.approach_depth > 60))
        throw std::invalid_argument("approach_depth must be 0 or in [refine_depth + 2, 60]");
    if (!(o.far_field >= 1.0) || !std::isfinite(o.far_field)) throw std::invalid_argument("far_field must be >= 1");
    if (o.max_levels < 2) throw std::invalid_argument("max_levels must be >= 2");
}

struct StencilOffset {
    Point offset;
    bool fine;  // within the small radius used by the jump test
};

std::vector<StencilOffset> make_stencil(const BoxGrid& grid, const EnvelopeOptions& o) {
    const int dim = grid.dim();
    const int per_axis = (1 << o.refine_depth) + 1;
    std::vector<StencilOffset> out;

    auto lattice = [&](int axis, int j) {
        return -0.5 * grid.spacing(axis) + j * grid.spacing(axis) / (1 << o.refine_depth);
    };
    for (int jy = 0; jy < (dim == 2 ? per_axis : 1); ++jy) {
        for (int jx = 0; jx < per_axis; ++jx) {
            Point p;
            p[0] = lattice(0, jx);
            if (dim == 2) p[1] = lattice(1, jy);
            if (p[0] == 0.0 && p[1] == 0.0) continue;
            out.push_back({p, false});
        }
    }

    std::vector<std::array<int, 2>> directions;
    for (int dy = (dim == 2 ? -1 : 0); dy <= (dim == 2 ? 1 : 0); ++dy)
        for (int dx = -1; dx <= 1; ++dx)
            if (dx != 0 || dy != 0) directions.push_back({dx, dy});

    const int fine_level = o.refine_depth + 2;
    for (int k = o.refine_depth + 1, deepest = o.resolved_approach_depth(dim); k <= deepest; ++k) {
        const double scale = std::ldexp(1.0, -k);
        for (auto d : directions) {
            Point p;
            p[0] = d[0] * grid.spacing(0) * scale;
            if (dim == 2) p[1] = d[1] * grid.spacing(1) * scale;
            out.push_back({p, k >= fine_level});
        }
    }
    return out;
}

Point shifted(const Point& x, const Point& offset) {
    Point p;
    p[0] = x[0] + offset[0];
    p[1] = x[1] + offset[1];
    return p;
}

// Quantile subsample of a sorted vector, always keeping both ends.
std::vector<double> thin(const std::vector<double>& sorted, std::size_t cap) {
    if (sorted.size() <= cap) return sorted;
    std::vector<double> out;
    out.reserve(cap);
    for (std::size_t k = 0; k < cap; ++k) {
        std::size_t idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * static_cast<double>(sorted.size() - 1) / static_cast<double>(cap - 1)));
        if (out.empty() || out.back() != sorted[idx]) out.push_back(sorted[idx]);
    }
    return out;
}

std::vector<double> distinct_finite(const SampledFunction& s) {
    std::vector<double> v;
    for (const auto& x : s.values())
        if (x.is_finite()) v.push_back(x.value());
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

// --- lower semicontinuous envelope ------------------------------------------

FunctionSpec ls_function(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    require_same_dim(f, grid);
    validate(options);
    auto stencil = std::make_shared<const std::vector<StencilOffset>>(make_stencil(grid, options));

    return FunctionSpec("ls(" + f.name() + ")", f.dim(), [f, stencil](const Point& x) {
        const ExtendedValue fx = f(x);
        ExtendedValue coarse = kInfinity, fine = kInfinity;
        for (const auto& s : *stencil) {
            ExtendedValue v = f(shifted(x, s.offset));
            coarse = min(coarse, v);
            if (s.fine) fine = min(fine, v);
        }
        if (fx.is_infinite()) return fine.is_finite() ? coarse : fx;
        if (coarse.is_infinite()) return fx;

        const double tol = value_tolerance(std::abs(fx.value()));
        const double drop = fx.value() - coarse.value();
        if (drop <= tol) return fx;
        const double fine_drop = fine.is_finite() ? fx.value() - fine.value() : -1.0;
        if (fine_drop > tol && fine_drop > 0.5 * drop) return coarse;
        return fx;
    });
}

SampledFunction ls_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return sample(ls_function(f, grid, options), grid);
}

SampledFunction ls_envelope(const FunctionSpec& f, const BoxGrid& grid, int refine_depth) {
    EnvelopeOptions o;
    o.refine_depth = refine_depth;
    return ls_envelope(f, grid, o);
}

// --- level convex envelope --------------------------------------------------

LevelConvexSweep LevelConvexSweep::build(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    require_same_dim(f, grid);
    validate(options);

    LevelConvexSweep sweep;
    sweep.dim_ = grid.dim();
    sweep.tol_ = 1e-9 * grid.extent();
    // 1D samples sit at exact coordinates; keep the band below the finest ray offset.
    if (grid.dim() == 1)
        sweep.tol_ = std::min(4 * std::numeric_limits<double>::epsilon() * grid.extent(),
                              0.5 * grid.spacing(0) * std::ldexp(1.0, -options.resolved_approach_depth(1)));

    const SampledFunction nodes = sample(f, grid);
    sweep.node_levels_ = thin(distinct_finite(nodes), options.max_levels);

    // Sample set: nodes, optional far lattice, and in 1D the stencil points.
    std::vector<Point> points;
    points.reserve(grid.size() * 2);
    for (std::size_t i = 0; i < grid.size(); ++i) points.push_back(grid.node(i));
    if (options.far_field > 1.0) {
        BoxGrid far = grid.scaled(options.far_field);
        for (std::size_t i = 0; i < far.size(); ++i) points.push_back(far.node(i));
    }
    if (grid.dim() == 1) {
        auto stencil = make_stencil(grid, options);
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (const auto& s : stencil) points.push_back(shifted(grid.node(i), s.offset));
    }

    std::vector<ExtendedValue> values(points.size());
    parallel_for(points.size(), [&](std::size_t i) { values[i] = f(points[i]); });

    if (grid.dim() == 1) {
        std::vector<std::size_t> order(points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return points[a][0] < points[b][0] || (points[a][0] == points[b][0] && values[a] < values[b]);
        });
        const std::size_t n = order.size();
        sweep.xs_.resize(n);
        sweep.prefix_min_.resize(n);
        sweep.suffix_min_.resize(n);
        ExtendedValue running = kInfinity;
        std::optional<double> lo, hi;
        for (std::size_t i = 0; i < n; ++i) {
            sweep.xs_[i] = points[order[i]][0];
            running = min(running, values[order[i]]);
            sweep.prefix_min_[i] = running;
            if (values[order[i]].is_finite()) {
                if (!lo) lo = sweep.xs_[i];
                hi = sweep.xs_[i];
            }
        }
        running = kInfinity;
        for (std::size_t i = n; i-- > 0;) {
            running = min(running, values[order[i]]);
            sweep.suffix_min_[i] = running;
        }
        sweep.domain_hull_ = lo ? Polytope::interval(*lo, *hi) : Polytope::empty(1);
        return sweep;
    }

    // 2D: nested hulls over increasing levels, built incrementally.
    std::vector<std::size_t> finite;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (values[i].is_finite()) finite.push_back(i);
    std::sort(finite.begin(), finite.end(),
              [&](std::size_t a, std::size_t b) { return values[a].value() < values[b].value(); });
    std::vector<double> all_levels;
    for (std::size_t i : finite) all_levels.push_back(values[i].value());
    all_levels.erase(std::unique(all_levels.begin(), all_levels.end()), all_levels.end());
    sweep.levels_ = thin(all_levels, options.max_levels);
    sweep.thinned_ = sweep.levels_.size() < all_levels.size();
    if (sweep.thinned_) sweep.source_ = f;

    std::size_t cursor = 0;
    Polytope current = Polytope::empty(2);
    for (double level : sweep.levels_) {
        std::vector<Point> batch(current.vertices().begin(), current.vertices().end());
        while (cursor < finite.size() && values[finite[cursor]].value() <= level) batch.push_back(points[finite[cursor++]]);
        current = geometry::convex_hull(batch, 2);
        sweep.hulls_.push_back(current);
    }
    sweep.domain_hull_ = sweep.hulls_.empty() ? Polytope::empty(2) : sweep.hulls_.back();
    return sweep;
}

ExtendedValue LevelConvexSweep::operator()(const Point& p) const {
    if (dim_ == 1) {
        if (xs_.empty()) return kInfinity;
        const double x = p[0];
        auto upper = std::upper_bound(xs_.begin(), xs_.end(), x + tol_);
        auto lower = std::lower_bound(xs_.begin(), xs_.end(), x - tol_);
        if (upper == xs_.begin() || lower == xs_.end()) return kInfinity;
        ExtendedValue left = prefix_min_[static_cast<std::size_t>(upper - xs_.begin()) - 1];
        ExtendedValue right = suffix_min_[static_cast<std::size_t>(lower - xs_.begin())];
        return max(left, right);
    }

    if (hulls_.empty() || !geometry::contains(hulls_.back(), p, tol_)) return kInfinity;
    std::size_t lo = 0, hi = hulls_.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (geometry::contains(hulls_[mid], p, tol_))
            hi = mid;
        else
            lo = mid + 1;
    }
    ExtendedValue v = ExtendedValue::finite(levels_[lo]);
    // Thinned levels may overshoot a sample; never exceed f itself.
    if (thinned_) v = min(v, (*source_)(p));
    return v;
}

FunctionSpec LevelConvexSweep::as_function(std::string name) const {
    auto self = std::make_shared<const LevelConvexSweep>(*this);
    return FunctionSpec(std::move(name), dim_, [self](const Point& p) { return (*self)(p); });
}

FunctionSpec lc_function(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return LevelConvexSweep::build(f, grid, options).as_function("lc(" + f.name() + ")");
}

SampledFunction lc_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return sample(lc_function(f, grid, options), grid);
}

FunctionSpec lslc_function(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return ls_function(lc_function(f, grid, options), grid, options).renamed("lslc(" + f.name() + ")");
}

SampledFunction lslc_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return sample(lslc_function(f, grid, options), grid);
}

SampledFunction lslc_envelope(const FunctionSpec& f, const BoxGrid& grid, int refine_depth) {
    EnvelopeOptions o;
    o.refine_depth = refine_depth;
    return lslc_envelope(f, grid, o);
}

SampledFunction ls_then_lc_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return lc_envelope(ls_function(f, grid, options), grid, options);
}

// --- sublevel geometry ------------------------------------------------------

Polytope sublevel_lslc(const FunctionSpec& f, const BoxGrid& grid, double lambda, double eps,
                       const EnvelopeOptions& options) {
    require_same_dim(f, grid);
    if (!(eps > 0)) throw std::invalid_argument("sublevel_lslc needs eps > 0");
    const auto bound = ExtendedValue::finite(lambda + eps);
    std::vector<Point> mask;
    auto collect = [&](const BoxGrid& g) {
        SampledFunction s = sample(f, g);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (s[i] <= bound) mask.push_back(g.node(i));
    };
    collect(grid);
    if (options.far_field > 1.0) collect(grid.scaled(options.far_field));
    return geometry::convex_hull(mask, grid.dim());
}

SublevelLadder sublevel_ladder(const FunctionSpec& f, const BoxGrid& grid, double lambda, const EnvelopeOptions& options) {
    SublevelLadder ladder;
    ladder.lambda = lambda;
    const double h = grid.max_spacing();
    const double tol = 1e-9 * grid.extent();
    for (double k : {4.0, 2.0, 1.0}) {
        ladder.eps.push_back(k * h);
        ladder.hulls.push_back(sublevel_lslc(f, grid, lambda, k * h, options));
    }
    for (std::size_t i = 1; i < ladder.hulls.size(); ++i)
        for (const auto& v : ladder.hulls[i].vertices())
            if (!geometry::contains(ladder.hulls[i - 1], v, tol)) ladder.monotone = false;
    return ladder;
}

Polytope effective_domain_hull(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    return LevelConvexSweep::build(f, grid, options).domain_hull();
}

ExtendedValue sampled_infimum(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    require_same_dim(f, grid);
    validate(options);
    const auto stencil = make_stencil(grid, options);
    std::vector<ExtendedValue> best(grid.size(), kInfinity);
    parallel_for(grid.size(), [&](std::size_t i) {
        const Point x = grid.node(i);
        ExtendedValue m = f(x);
        for (const auto& s : stencil) m = min(m, f(shifted(x, s.offset)));
        best[i] = m;
    });
    ExtendedValue out = kInfinity;
    for (const auto& v : best) out = min(out, v);
    return out;
}

// --- reports ----------------------------------------------------------------

bool ordering_holds(const SampledFunction& lower, const SampledFunction& upper) {
    if (lower.size() != upper.size()) throw std::invalid_argument("ordering_holds: size mismatch");
    const double tol = value_tolerance(std::max(lower.value_scale(), upper.value_scale()));
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (upper[i].is_infinite()) continue;
        if (lower[i].is_infinite() || lower[i].value() > upper[i].value() + tol) return false;
    }
    return true;
}

bool infimum_preserved(std::initializer_list<const SampledFunction*> arrays) {
    double scale = 0.0;
    for (const auto* a : arrays) scale = std::max(scale, a->value_scale());
    const double tol = value_tolerance(scale);
    const ExtendedValue first = (*arrays.begin())->min_value();
    for (const auto* a : arrays) {
        ExtendedValue m = a->min_value();
        if (m.is_infinite() != first.is_infinite()) return false;
        if (m.is_finite() && std::abs(m.value() - first.value()) > tol) return false;
    }
    return true;
}

EnvelopeReport compute_envelopes(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    require_same_dim(f, grid);
    validate(options);
    LevelConvexSweep sweep = LevelConvexSweep::build(f, grid, options);
    FunctionSpec lc = sweep.as_function("lc(" + f.name() + ")");

    SampledFunction values = sample(f, grid);
    SampledFunction ls = sample(ls_function(f, grid, options), grid);
    SampledFunction lc_values = sample(lc, grid);
    SampledFunction lslc = sample(ls_function(lc, grid, options), grid);

    ExtendedValue inf = values.min_value();
    SublevelLadder ladder = inf.is_finite() ? sublevel_ladder(f, grid, inf.value(), options) : SublevelLadder{};

    EnvelopeReport report{f.name(), "",   grid, values, ls, lc_values, lslc, sweep.lambda_grid(),
                          options,  ladder, sweep.domain_hull()};
    report.ordering_ok = ordering_holds(lslc, lc_values) && ordering_holds(lc_values, values) &&
                         ordering_holds(lslc, ls) && ordering_holds(ls, values);
    // f and f_lc need not attain their infimum at a node; the lsc envelopes do.
    const double tol = value_tolerance(values.value_scale());
    report.infimum_ok = infimum_preserved({&ls, &lslc});
    for (const ExtendedValue seen : {sampled_infimum(f, grid, options), sampled_infimum(lc, grid, options)}) {
        const ExtendedValue m = ls.min_value();
        if (seen.is_infinite() != m.is_infinite() || (m.is_finite() && std::abs(seen.value() - m.value()) > tol))
            report.infimum_ok = false;
    }
    return report;
}

// --- hypothesis (H) ---------------------------------------------------------

namespace {

// Largest one-cell value change one node further out on either side of each
// axis, per unit length. Skipping the first ring keeps an isolated jump at the
// node itself from inflating the estimate.
double local_lipschitz(const SampledFunction& s, std::size_t flat) {
    const BoxGrid& g = s.grid();
    auto idx = g.multi_index(flat);
    double best = 0.0;
    for (int axis = 0; axis < g.dim(); ++axis) {
        for (int side : {-1, 1}) {
            auto near = idx, far = idx;
            near[axis] += side;
            far[axis] += 2 * side;
            if (far[axis] < 0 || far[axis] >= g.nodes(axis)) continue;
            const auto& a = s[g.flat_index(near[0], near[1])];
            const auto& b = s[g.flat_index(far[0], far[1])];
            if (a.is_infinite() || b.is_infinite()) continue;
            best = std::max(best, std::abs(a.value() - b.value()) / g.spacing(axis));
        }
    }
    return best;
}

bool has_interior_node(const BoxGrid& g, const std::vector<char>& mask) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!mask[i]) continue;
        auto idx = g.multi_index(i);
        bool interior = true;
        for (int axis = 0; axis < g.dim() && interior; ++axis) {
            for (int side : {-1, 1}) {
                auto n = idx;
                n[axis] += side;
                if (n[axis] < 0 || n[axis] >= g.nodes(axis) || !mask[g.flat_index(n[0], n[1])]) {
                    interior = false;
                    break;
                }
            }
        }
        if (interior) return true;
    }
    return false;
}

std::optional<std::array<Point, 2>> symmetric_pair(const BoxGrid& g, const std::vector<char>& mask, std::size_t center) {
    auto c = g.multi_index(center);
    const int ry = g.dim() == 2 ? g.nodes(1) : 0;
    for (int r = 1; r < std::max(g.nodes(0), ry == 0 ? 1 : ry); ++r) {
        for (int dy = -std::min(r, ry); dy <= std::min(r, ry); ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
                if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                int ax = c[0] - dx, ay = c[1] - dy, bx = c[0] + dx, by = c[1] + dy;
                if (ax < 0 || bx < 0 || ax >= g.nodes(0) || bx >= g.nodes(0)) continue;
                if (g.dim() == 2 && (ay < 0 || by < 0 || ay >= g.nodes(1) || by >= g.nodes(1))) continue;
                if (mask[g.flat_index(ax, ay)] && mask[g.flat_index(bx, by)])
                    return std::array<Point, 2>{g.node(g.flat_index(ax, ay)), g.node(g.flat_index(bx, by))};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

HypothesisHReport check_hypothesis_H(const FunctionSpec& f, const BoxGrid& grid, const std::vector<double>& lambda_probes) {
    require_same_dim(f, grid);
    if (lambda_probes.empty()) throw std::invalid_argument("check_hypothesis_H needs at least one probe level");
    SampledFunction s = sample(f, grid);
    const ExtendedValue inf = s.min_value();
    for (double lambda : lambda_probes)
        if (inf.is_infinite() || !(lambda > inf.value()))
            throw std::invalid_argument("probe level " + std::to_string(lambda) + " is not above the sampled infimum");

    const double h = grid.max_spacing();
    const double geom_tol = 1e-9 * grid.extent();
    HypothesisHReport report;
    report.holds = true;

    for (double lambda : lambda_probes) {
        std::vector<char> mask(grid.size(), 0);
        std::vector<Point> pts;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (s[i].is_finite() && s[i].value() <= lambda) {
                mask[i] = 1;
                pts.push_back(grid.node(i));
            }
        }
        Polytope hull = geometry::convex_hull(pts, grid.dim());

        std::vector<std::pair<double, std::size_t>> violations;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (mask[i] || !geometry::contains(hull, grid.node(i), geom_tol)) continue;
            const double tol_h = 2.0 * local_lipschitz(s, i) * h;
            const double excess = s[i].is_infinite() ? std::numeric_limits<double>::infinity() : s[i].value() - lambda;
            if (excess > tol_h) violations.emplace_back(excess, i);
        }
        HypothesisHProbe probe{lambda, violations.empty(), has_interior_node(grid, mask)};
        report.probes.push_back(probe);

        if (probe.convex_ok && probe.interior_ok) continue;
        report.holds = false;
        if (report.failing_lambda) continue;
        report.failing_lambda = lambda;
        if (!violations.empty()) {
            std::stable_sort(violations.begin(), violations.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            report.violation = grid.node(violations.front().second);
            for (std::size_t k = 0; k < std::min<std::size_t>(violations.size(), 64); ++k) {
                if (auto pair = symmetric_pair(grid, mask, violations[k].second)) {
                    report.witness = pair;
                    report.violation = grid.node(violations[k].second);
                    break;
                }
            }
        }
    }
    return report;
}

// --- Phi-equivariance -------------------------------------------------------

PhiEquivariance phi_equivariance_check(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options) {
    SampledFunction direct = lslc_envelope(compose_phi(f), grid, options);
    SampledFunction base = lslc_envelope(f, grid, options);

    auto phi = [](const ExtendedValue& v) {
        return v.is_infinite() ? std::numbers::pi / 2 : std::atan(v.value());
    };

    PhiEquivariance result;
    result.tolerance = 1e-6 + grid.max_spacing();
    for (std::size_t i = 0; i < grid.size(); ++i)
        result.max_gap = std::max(result.max_gap, std::abs(direct[i].value() - phi(base[i])));

    result.masks_match = true;
    std::vector<double> levels = thin(distinct_finite(base), 256);
    // Mirror-image nodes differ in the last bits, so both masks get the value band.
    const double band = value_tolerance(base.value_scale());
    for (double level : levels) {
        const double mapped = std::atan(level + band) + 1e-15;
        for (std::size_t i = 0; i < grid.size() && result.masks_match; ++i) {
            bool in_base = base[i].is_finite() && base[i].value() <= level + band;
            bool in_direct = direct[i].value() <= mapped;
            if (in_base != in_direct) result.masks_match = false;
        }
    }
    result.ok = result.max_gap <= result.tolerance && result.masks_match;
    return result;
}

}  // namespace supenv::envelopes
