#include "lp/lp_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace supenv::lp {

SampledFunction power_biconjugate(const SampledFunction& samples, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("power_biconjugate needs finite p >= 1");
    if (samples.all_infinite()) throw std::invalid_argument("power_biconjugate: every sample is +inf");

    double c = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& v = samples[i];
        if (v.is_infinite()) continue;
        if (v.value() < 0) {
            std::ostringstream msg;
            msg << "power_biconjugate needs f >= 0, found " << v.value() << " at node " << i;
            throw DomainError(msg.str());
        }
        c = std::max(c, v.value());
    }

    std::vector<ExtendedValue> powered(samples.size(), kInfinity);
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (samples[i].is_finite())
            powered[i] = ExtendedValue::finite(c > 0 ? std::pow(samples[i].value() / c, p) : 0.0);

    SampledFunction hull = geometry::lower_hull_epigraph(SampledFunction(samples.grid(), std::move(powered)));
    std::vector<ExtendedValue> out(samples.size(), kInfinity);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (hull[i].is_infinite()) continue;
        out[i] = ExtendedValue::finite(c * std::pow(std::max(hull[i].value(), 0.0), 1.0 / p));
    }
    return SampledFunction(samples.grid(), std::move(out));
}

SampledFunction power_biconjugate(const FunctionSpec& f, const BoxGrid& grid, double p,
                                  const envelopes::EnvelopeOptions& options) {
    if (grid.dim() != 1) throw std::invalid_argument("power_biconjugate supports dimension 1 only");
    return power_biconjugate(envelopes::ls_envelope(f, grid, options), p);
}

double max_abs_gap(const SampledFunction& a, const SampledFunction& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_infinite() && b[i].is_infinite()) continue;
        if (a[i].is_infinite() || b[i].is_infinite()) return std::numeric_limits<double>::infinity();
        gap = std::max(gap, std::abs(a[i].value() - b[i].value()));
    }
    return gap;
}

SweepReport p_sweep(const FunctionSpec& f, const BoxGrid& grid, const std::vector<double>& p_ladder,
                    const envelopes::EnvelopeOptions& options) {
    if (p_ladder.empty()) throw std::invalid_argument("p ladder is empty");
    for (std::size_t i = 0; i < p_ladder.size(); ++i) {
        if (!(p_ladder[i] >= 1.0)) throw std::invalid_argument("p ladder entries must be >= 1");
        if (i > 0 && !(p_ladder[i] > p_ladder[i - 1])) throw std::invalid_argument("p ladder must be strictly increasing");
    }
    if (grid.dim() != 1) throw std::invalid_argument("p_sweep supports dimension 1 only");

    SampledFunction base = envelopes::ls_envelope(f, grid, options);
    std::vector<SampledFunction> rungs;
    for (double p : p_ladder) rungs.push_back(power_biconjugate(base, p));
    SampledFunction target = envelopes::lslc_envelope(f, grid, options);

    std::vector<ExtendedValue> sup(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ExtendedValue best = rungs.front()[i];
        for (const auto& r : rungs) best = max(best, r[i]);
        sup[i] = best;
    }

    SweepReport report{p_ladder, rungs, SampledFunction(grid, std::move(sup)), target};
    report.monotone_ok = true;
    for (std::size_t k = 1; k < rungs.size(); ++k)
        if (!envelopes::ordering_holds(rungs[k - 1], rungs[k])) report.monotone_ok = false;
    report.bounded_ok = true;
    for (const auto& r : rungs)
        if (!envelopes::ordering_holds(r, target)) report.bounded_ok = false;
    report.max_gap = max_abs_gap(target, report.sup_array);
    return report;
}

}  // namespace supenv::lp
