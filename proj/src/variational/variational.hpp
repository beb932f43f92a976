#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "envelopes/envelopes.hpp"

namespace supenv::variational {

// Uniform admissible slopes lo + j * (hi - lo) / (count - 1).
struct SlopeGrid {
    double lo = -2.0;
    double hi = 2.0;
    int count = 401;

    double step() const { return (hi - lo) / (count - 1); }
    double slope(int j) const { return lo + j * step(); }
    BoxGrid as_grid() const { return BoxGrid(lo, hi, count); }
};

// A supremand restricted to `cells` consecutive mesh cells.
struct Piece {
    FunctionSpec f;
    int cells;
};

// min sup_x f(u'(x)) over u on [0, 1] with u(0) = a, u(1) = b, discretized on
// `intervals` equal cells. With more than one piece the supremand is
// piecewise constant in x: piece k covers its `cells` cells, in order.
struct BVProblem {
    std::vector<Piece> pieces;
    double a = 0.0;
    double b = 0.0;
    int intervals = 64;
    SlopeGrid slopes;

    static BVProblem single(FunctionSpec f, double a, double b, int intervals = 64, SlopeGrid slopes = {});
    double mean_slope() const { return b - a; }
    void validate() const;
};

// f^lslc(b - a), linearly interpolated between nodes of `grid`.
ExtendedValue supremal_relaxed_min(const FunctionSpec& f, double a, double b, const BoxGrid& grid,
                                   const envelopes::EnvelopeOptions& options = {});

// Relaxed minimum of a piecewise-constant-in-x problem: the least t such that
// b - a is a cell-weighted average of slopes m_k with f_k^lslc(m_k) <= t.
// Reduces to supremal_relaxed_min at the nodes for a single piece.
ExtendedValue piecewise_relaxed_min(const BVProblem& problem, const envelopes::EnvelopeOptions& options = {});

// Exact minimum of ((1/N) sum_i f_i(s_i)^p)^(1/p) over slope assignments from
// the slope grid whose index sum is within one grid step of N (b - a), by
// dynamic programming over (cell, accumulated slope index).
double lp_min_dp(const BVProblem& problem, double p);

inline constexpr double kTolMin = 0.05;

struct GammaMinReport {
    std::vector<double> p_ladder;
    std::vector<double> minima;
    // ((f^p)**)^(1/p)(b - a) per p; single-piece problems only.
    std::vector<double> biconjugate;
    ExtendedValue relaxed_min;
    std::vector<double> gaps;
    bool minima_monotone = false;
    bool gaps_nonincreasing = false;
    bool final_gap_ok = false;
    bool matches_biconjugate = false;
    bool passed() const { return minima_monotone && gaps_nonincreasing && final_gap_ok && matches_biconjugate; }
};

GammaMinReport gamma_min_sweep(const BVProblem& problem, const std::vector<double>& p_ladder,
                               const envelopes::EnvelopeOptions& options = {});

// A piecewise-linear u_n on [0, 1] approximating x -> xi * x with every slope
// strictly inside the open interval C = (c_lo, c_hi).
struct RecoverySequence {
    int n = 1;
    double xi = 0.0;
    double c_lo = 0.0, c_hi = 0.0;
    std::vector<double> breakpoints;
    std::vector<double> values;  // u_n at the breakpoints
    std::vector<double> slopes;
    double sup_deviation = 0.0;  // max |u_n(x) - xi x|

    bool slopes_inside() const;
};

RecoverySequence recovery_sequence(double c_lo, double c_hi, double xi, int n);

// A zero-boundary piecewise-linear test function phi on [0, 1].
struct Counterexample {
    std::uint64_t trial = 0;
    std::vector<double> breakpoints;  // 0 = t_0 < ... < t_k = 1
    std::vector<double> values;       // phi(t_i); first and last are 0
    std::vector<double> slopes;
    double f_at_xi = 0.0;
    double sup_value = 0.0;  // max_i f(xi + slope_i)
    double gap() const { return f_at_xi - sup_value; }
};

struct FalsifyOptions {
    int trials = 1000;
    std::uint64_t seed = 1;
    int max_pieces = 8;
    double amplitude = 2.0;
};

// Samples random phi and returns the one with the largest gap
// f(xi) - max_i f(xi + phi'_i) if that gap exceeds 1e-9 * (1 + |f(xi)|).
// A hit proves f is not weak Morrey quasiconvex at xi; no hit proves nothing.
std::optional<Counterexample> weak_morrey_falsify(const FunctionSpec& f, double xi, const FalsifyOptions& options = {});

// Recomputes the slopes from breakpoints and values and re-evaluates the gap.
double reevaluate_gap(const FunctionSpec& f, double xi, const Counterexample& cex);

}  // namespace supenv::variational
