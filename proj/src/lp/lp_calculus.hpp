#pragma once

#include <vector>

#include "envelopes/envelopes.hpp"

namespace supenv::lp {

// ((f^p)**)^(1/p) at the nodes of a 1D grid.
//
// The samples are taken from the lsc estimator of f (the biconjugate only
// sees the lsc envelope), normalized by their largest finite value c so the
// power stays in [0, 1], convexified, rooted and rescaled: ((c g)^p)** = c^p (g^p)**.
// Throws on a negative sample, on an all-inf sample or on p < 1.
SampledFunction power_biconjugate(const FunctionSpec& f, const BoxGrid& grid, double p,
                                  const envelopes::EnvelopeOptions& options = {});

// Same pipeline on already-sampled values (no lsc pre-step).
SampledFunction power_biconjugate(const SampledFunction& samples, double p);

struct SweepReport {
    std::vector<double> p_ladder;
    std::vector<SampledFunction> rungs;
    SampledFunction sup_array;
    SampledFunction target;  // f^lslc
    double max_gap = 0.0;
    bool monotone_ok = false;
    // Every rung <= target + tol.
    bool bounded_ok = false;
};

inline const std::vector<double> kDefaultLadder{1, 2, 4, 8, 16, 32, 64};

SweepReport p_sweep(const FunctionSpec& f, const BoxGrid& grid, const std::vector<double>& p_ladder = kDefaultLadder,
                    const envelopes::EnvelopeOptions& options = {});

// Largest nodewise |a - b|; nodes where both are +inf count as 0, one-sided +inf as +inf.
double max_abs_gap(const SampledFunction& a, const SampledFunction& b);

}  // namespace supenv::lp
