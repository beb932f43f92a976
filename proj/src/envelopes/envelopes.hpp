#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/function.hpp"
#include "geometry/polytope.hpp"

namespace supenv::envelopes {

struct EnvelopeOptions {
    // Dyadic level of the lsc stencil: (2^depth + 1)^n lattice points in the
    // closed max-norm ball of radius h/2.
    int refine_depth = 3;
    // Deepest approach level: rays from the node reach offsets h * 2^-depth.
    // 0 picks 40 in 1D and refine_depth + 4 in 2D, where the squared cost of
    // nested estimators would otherwise dominate.
    int approach_depth = 0;

    int resolved_approach_depth(int dim) const {
        if (approach_depth > 0) return approach_depth;
        return dim == 1 ? 40 : refine_depth + 4;
    }
    // Sublevel hulls are also fed by a concentric lattice this many times
    // larger than the box (same node counts). 1 keeps the box as the universe.
    double far_field = 1.0;
    // Cap on the number of levels kept by the 2D sweep (quantile thinning).
    std::size_t max_levels = 4096;
};

// Lower-semicontinuous envelope estimator, evaluable at any point.
//
// At x the estimator compares f(x) with the minimum over a stencil made of
// the dyadic lattice of the h/2 ball and of approach rays toward x along the
// 3^n - 1 lattice directions. The drop f(x) - min is treated as a jump only if
// at least half of it survives within radius h * 2^-(depth+2); otherwise the
// variation is attributed to continuity and f(x) is returned unchanged. At a
// jump the stencil minimum is returned, which may undershoot the true liminf
// by the variation of the lower branch over h/2.
FunctionSpec ls_function(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});
SampledFunction ls_envelope(const FunctionSpec& f, const BoxGrid& grid, int refine_depth = 3);
SampledFunction ls_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options);

// f^lc(xi) = inf{lambda : xi in co L_lambda(f)} over a finite sample set:
// the grid nodes, the far-field lattice when enabled, and in 1D the lsc
// stencil points of every node.
class LevelConvexSweep {
public:
    static LevelConvexSweep build(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

    ExtendedValue operator()(const Point& p) const;

    // Distinct finite node values, quantile-thinned to options.max_levels.
    const std::vector<double>& lambda_grid() const { return node_levels_; }
    // Hull of every finite sample: the effective domain of the envelope.
    const geometry::Polytope& domain_hull() const { return domain_hull_; }
    double membership_tolerance() const { return tol_; }

    FunctionSpec as_function(std::string name) const;

private:
    LevelConvexSweep() = default;

    int dim_ = 1;
    double tol_ = 0.0;
    std::vector<double> node_levels_;
    geometry::Polytope domain_hull_ = geometry::Polytope::empty(1);

    // 1D: sample abscissae with prefix and suffix minima.
    std::vector<double> xs_;
    std::vector<ExtendedValue> prefix_min_, suffix_min_;

    // 2D: kept levels with their nested hulls.
    std::vector<double> levels_;
    std::vector<geometry::Polytope> hulls_;
    bool thinned_ = false;
    std::optional<FunctionSpec> source_;
};

FunctionSpec lc_function(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});
SampledFunction lc_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

// (f^lc)^ls
FunctionSpec lslc_function(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});
SampledFunction lslc_envelope(const FunctionSpec& f, const BoxGrid& grid, int refine_depth = 3);
SampledFunction lslc_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options);

// (f^ls)^lc, the other side of the ordering f^lslc <= (f^ls)^lc.
SampledFunction ls_then_lc_envelope(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

// Hull of the node mask {f <= lambda + eps} (far-field lattice included when enabled).
geometry::Polytope sublevel_lslc(const FunctionSpec& f, const BoxGrid& grid, double lambda, double eps,
                                 const EnvelopeOptions& options = {});

struct SublevelLadder {
    double lambda;
    std::vector<double> eps;  // decreasing
    std::vector<geometry::Polytope> hulls;
    bool monotone = true;     // each hull contains the next one
};
// eps in {4h, 2h, h}, h = largest grid spacing.
SublevelLadder sublevel_ladder(const FunctionSpec& f, const BoxGrid& grid, double lambda,
                               const EnvelopeOptions& options = {});

geometry::Polytope effective_domain_hull(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

struct EnvelopeReport {
    std::string name;
    std::string expression;  // empty unless built from the expression language
    BoxGrid grid;
    SampledFunction f, f_ls, f_lc, f_lslc;
    std::vector<double> lambda_grid;
    EnvelopeOptions options;
    SublevelLadder min_sublevel;
    geometry::Polytope domain_hull;
    // Pointwise f_lslc <= f_lc <= f and f_lslc <= f_ls <= f.
    bool ordering_ok = false;
    // Node minima of the envelopes agree with each other and with the sampled infimum of f.
    bool infimum_ok = false;
};

EnvelopeReport compute_envelopes(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

// Minimum of f over the nodes and the lsc stencil points of every node: the
// infimum the envelopes can see, which may lie strictly below the node minimum.
ExtendedValue sampled_infimum(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

// Checks order relations and infimum preservation; tolerance 1e-9 * (1 + scale).
bool ordering_holds(const SampledFunction& lower, const SampledFunction& upper);
bool infimum_preserved(std::initializer_list<const SampledFunction*> arrays);

struct HypothesisHProbe {
    double lambda;
    bool convex_ok;
    bool interior_ok;
};

struct HypothesisHReport {
    bool holds = false;
    std::optional<double> failing_lambda;
    // Two sublevel nodes and the grid point between them where f exceeds lambda + tol_H.
    std::optional<std::array<Point, 2>> witness;
    std::optional<Point> violation;
    std::vector<HypothesisHProbe> probes;
};

// Tests convexity (tolerance tol_H = 2 * local Lipschitz * h) and nonempty
// interior of the node sublevel sets at each probe level.
HypothesisHReport check_hypothesis_H(const FunctionSpec& f, const BoxGrid& grid, const std::vector<double>& lambda_probes);

struct PhiEquivariance {
    bool ok = false;
    double max_gap = 0.0;
    double tolerance = 0.0;
    bool masks_match = false;
};

// Compares lslc(arctan o f) with arctan o lslc(f) nodewise and by sublevel masks.
PhiEquivariance phi_equivariance_check(const FunctionSpec& f, const BoxGrid& grid, const EnvelopeOptions& options = {});

}  // namespace supenv::envelopes
