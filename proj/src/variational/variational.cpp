#include "variational/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lp/lp_calculus.hpp"

namespace supenv::variational {

namespace {

ExtendedValue interpolate(const SampledFunction& s, double x) {
    const BoxGrid& g = s.grid();
    const double pos = (x - g.lo(0)) / g.spacing(0);
    const double tol = 1e-9;
    if (pos < -tol || pos > g.nodes(0) - 1 + tol) throw std::invalid_argument("interpolation point outside the grid");
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= tol) return s[static_cast<std::size_t>(nearest)];
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double t = pos - static_cast<double>(i);
    if (s[i].is_infinite() || s[i + 1].is_infinite()) return kInfinity;
    return ExtendedValue::finite((1 - t) * s[i].value() + t * s[i + 1].value());
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

BVProblem BVProblem::single(FunctionSpec f, double a, double b, int intervals, SlopeGrid slopes) {
    BVProblem p;
    p.pieces.push_back({std::move(f), intervals});
    p.a = a;
    p.b = b;
    p.intervals = intervals;
    p.slopes = slopes;
    p.validate();
    return p;
}

void BVProblem::validate() const {
    if (intervals < 1) throw std::invalid_argument("intervals must be >= 1");
    if (pieces.empty()) throw std::invalid_argument("problem has no supremand");
    int total = 0;
    for (const auto& piece : pieces) {
        if (piece.f.dim() != 1) throw std::invalid_argument("supremand '" + piece.f.name() + "' must be one-dimensional");
        if (piece.cells < 1) throw std::invalid_argument("every piece needs at least one cell");
        total += piece.cells;
    }
    if (total != intervals) throw std::invalid_argument("piece cells must add up to intervals");
    if (slopes.count < 2 || !(slopes.lo < slopes.hi)) throw std::invalid_argument("slope grid needs lo < hi and >= 2 slopes");
    const double m = mean_slope();
    if (!(m >= slopes.lo && m <= slopes.hi)) {
        std::ostringstream msg;
        msg << "mean slope b - a = " << m << " lies outside the slope grid [" << slopes.lo << ", " << slopes.hi << "]";
        throw std::invalid_argument(msg.str());
    }
}

ExtendedValue supremal_relaxed_min(const FunctionSpec& f, double a, double b, const BoxGrid& grid,
                                   const envelopes::EnvelopeOptions& options) {
    if (grid.dim() != 1) throw std::invalid_argument("supremal_relaxed_min needs a 1D grid");
    const double slope = b - a;
    if (!(slope >= grid.lo(0) && slope <= grid.hi(0))) {
        std::ostringstream msg;
        msg << "slope b - a = " << slope << " lies outside the box [" << grid.lo(0) << ", " << grid.hi(0) << "]";
        throw std::invalid_argument(msg.str());
    }
    return interpolate(envelopes::lslc_envelope(f, grid, options), slope);
}

ExtendedValue piecewise_relaxed_min(const BVProblem& problem, const envelopes::EnvelopeOptions& options) {
    problem.validate();
    const BoxGrid grid = problem.slopes.as_grid();
    std::vector<SampledFunction> envelopes_k;
    std::vector<double> candidates;
    for (const auto& piece : problem.pieces) {
        envelopes_k.push_back(envelopes::lslc_envelope(piece.f, grid, options));
        for (const auto& v : envelopes_k.back().values())
            if (v.is_finite()) candidates.push_back(v.value());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const double m = problem.mean_slope();
    const double tol = 1e-9 * (1.0 + std::abs(problem.slopes.hi - problem.slopes.lo));
    auto feasible = [&](double t) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t k = 0; k < problem.pieces.size(); ++k) {
            const double w = static_cast<double>(problem.pieces[k].cells) / problem.intervals;
            std::optional<double> l, r;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto& v = envelopes_k[k][i];
                if (v.is_finite() && v.value() <= t) {
                    if (!l) l = grid.node(i)[0];
                    r = grid.node(i)[0];
                }
            }
            if (!l) return false;
            lo += w * *l;
            hi += w * *r;
        }
        return lo <= m + tol && m <= hi + tol;
    };

    auto it = std::partition_point(candidates.begin(), candidates.end(), [&](double t) { return !feasible(t); });
    if (it == candidates.end()) return kInfinity;
    return ExtendedValue::finite(*it);
}

double lp_min_dp(const BVProblem& problem, double p) {
    problem.validate();
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_min_dp needs finite p >= 1");

    const int M = problem.slopes.count;
    const int N = problem.intervals;
    const long long max_sum = static_cast<long long>(N) * (M - 1);

    // Cost tables, normalized by the largest finite value over all pieces.
    std::vector<std::vector<ExtendedValue>> raw;
    double c = 0.0;
    for (const auto& piece : problem.pieces) {
        std::vector<ExtendedValue> row(M);
        for (int j = 0; j < M; ++j) {
            row[j] = piece.f(problem.slopes.slope(j));
            if (row[j].is_finite()) {
                if (row[j].value() < 0) throw DomainError("lp_min_dp needs f >= 0 on the slope grid");
                c = std::max(c, row[j].value());
            }
        }
        raw.push_back(std::move(row));
    }
    constexpr long double kInf = std::numeric_limits<long double>::infinity();
    std::vector<std::vector<long double>> cost(raw.size(), std::vector<long double>(M, kInf));
    for (std::size_t k = 0; k < raw.size(); ++k)
        for (int j = 0; j < M; ++j)
            if (raw[k][j].is_finite())
                cost[k][j] = c > 0 ? std::pow(static_cast<long double>(raw[k][j].value()) / c, static_cast<long double>(p)) : 0.0L;

    // Terminal band: the exact index sum when representable, else its two neighbours.
    double target = N * (problem.mean_slope() - problem.slopes.lo) / problem.slopes.step();
    if (std::abs(target - std::round(target)) <= 1e-6) target = std::round(target);
    long long low_t = static_cast<long long>(std::ceil(target));
    long long high_t = static_cast<long long>(std::floor(target));
    if (low_t > high_t) std::swap(low_t, high_t);
    low_t = std::max(0LL, low_t);
    high_t = std::min(max_sum, high_t);
    if (low_t > high_t) throw std::invalid_argument("mean slope is not representable on the slope grid");

    std::vector<int> piece_of;
    for (std::size_t k = 0; k < problem.pieces.size(); ++k)
        piece_of.insert(piece_of.end(), problem.pieces[k].cells, static_cast<int>(k));

    std::vector<long double> dp(static_cast<std::size_t>(max_sum + 1), kInf), next(dp.size(), kInf);
    dp[0] = 0.0L;
    long long cur_lo = 0, cur_hi = 0;
    for (int i = 0; i < N; ++i) {
        const auto& row = cost[static_cast<std::size_t>(piece_of[static_cast<std::size_t>(i)])];
        const long long remaining = static_cast<long long>(N - i - 1) * (M - 1);
        const long long new_lo = std::max(0LL, low_t - remaining);
        const long long new_hi = std::min(high_t, static_cast<long long>(i + 1) * (M - 1));
        if (new_lo > new_hi) throw std::invalid_argument("mean slope is not reachable on the slope grid");
        std::fill(next.begin() + new_lo, next.begin() + new_hi + 1, kInf);
        for (long long t = cur_lo; t <= cur_hi; ++t) {
            const long double base = dp[static_cast<std::size_t>(t)];
            if (base == kInf) continue;
            const long long j_lo = std::max(0LL, new_lo - t);
            const long long j_hi = std::min(static_cast<long long>(M - 1), new_hi - t);
            for (long long j = j_lo; j <= j_hi; ++j) {
                const long double cand = base + row[static_cast<std::size_t>(j)];
                long double& slot = next[static_cast<std::size_t>(t + j)];
                if (cand < slot) slot = cand;
            }
        }
        std::swap(dp, next);
        cur_lo = new_lo;
        cur_hi = new_hi;
    }

    long double best = kInf;
    for (long long t = low_t; t <= high_t; ++t) best = std::min(best, dp[static_cast<std::size_t>(t)]);
    if (best == kInf) throw std::invalid_argument("no admissible slope assignment has finite energy");
    return c * static_cast<double>(std::pow(best / N, 1.0L / static_cast<long double>(p)));
}

GammaMinReport gamma_min_sweep(const BVProblem& problem, const std::vector<double>& p_ladder,
                               const envelopes::EnvelopeOptions& options) {
    problem.validate();
    if (p_ladder.empty()) throw std::invalid_argument("p ladder is empty");
    for (std::size_t i = 1; i < p_ladder.size(); ++i)
        if (!(p_ladder[i] > p_ladder[i - 1])) throw std::invalid_argument("p ladder must be strictly increasing");

    GammaMinReport report;
    report.p_ladder = p_ladder;
    const BoxGrid grid = problem.slopes.as_grid();
    const bool single = problem.pieces.size() == 1;
    report.relaxed_min = single ? supremal_relaxed_min(problem.pieces.front().f, problem.a, problem.b, grid, options)
                                : piecewise_relaxed_min(problem, options);

    for (double p : p_ladder) {
        const double m = lp_min_dp(problem, p);
        report.minima.push_back(m);
        report.gaps.push_back(report.relaxed_min.is_infinite() ? std::numeric_limits<double>::infinity()
                                                               : std::abs(report.relaxed_min.value() - m));
        if (single) {
            auto rung = lp::power_biconjugate(problem.pieces.front().f, grid, p, options);
            report.biconjugate.push_back(interpolate(rung, problem.mean_slope()).to_double());
        }
    }

    report.minima_monotone = true;
    report.gaps_nonincreasing = true;
    for (std::size_t k = 1; k < report.minima.size(); ++k) {
        if (report.minima[k] < report.minima[k - 1] - kTolMin) report.minima_monotone = false;
        if (report.gaps[k] > report.gaps[k - 1] + kTolMin) report.gaps_nonincreasing = false;
    }
    report.final_gap_ok = report.gaps.back() <= kTolMin;
    report.matches_biconjugate = true;
    for (std::size_t k = 0; k < report.biconjugate.size(); ++k)
        if (!(std::abs(report.minima[k] - report.biconjugate[k]) <= kTolMin)) report.matches_biconjugate = false;
    return report;
}

bool RecoverySequence::slopes_inside() const {
    return std::all_of(slopes.begin(), slopes.end(), [this](double s) { return c_lo < s && s < c_hi; });
}

RecoverySequence recovery_sequence(double c_lo, double c_hi, double xi, int n) {
    if (!(c_lo < c_hi)) throw std::invalid_argument("constraint interval needs c_lo < c_hi");
    if (n < 1) throw std::invalid_argument("recovery index n must be >= 1");
    if (!(xi >= c_lo && xi <= c_hi)) {
        std::ostringstream msg;
        msg << "xi = " << xi << " lies outside the closure [" << c_lo << ", " << c_hi << "]";
        throw std::invalid_argument(msg.str());
    }

    RecoverySequence seq;
    seq.n = n;
    seq.xi = xi;
    seq.c_lo = c_lo;
    seq.c_hi = c_hi;
    double slope = xi;
    if (xi == c_lo || xi == c_hi) {
        const double mid = 0.5 * (c_lo + c_hi);
        slope = (1.0 - 1.0 / n) * xi + mid / n;
    }
    seq.breakpoints = {0.0, 1.0};
    seq.values = {0.0, slope};
    seq.slopes = {slope};
    for (std::size_t i = 0; i < seq.breakpoints.size(); ++i)
        seq.sup_deviation = std::max(seq.sup_deviation, std::abs(seq.values[i] - xi * seq.breakpoints[i]));
    return seq;
}

std::optional<Counterexample> weak_morrey_falsify(const FunctionSpec& f, double xi, const FalsifyOptions& options) {
    if (f.dim() != 1) throw std::invalid_argument("weak_morrey_falsify supports one-dimensional supremands");
    if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (options.max_pieces < 2) throw std::invalid_argument("max_pieces must be >= 2");

    const ExtendedValue f_xi = f(xi);
    if (f_xi.is_infinite()) throw std::invalid_argument("f(xi) is +inf; choose xi in the effective domain");
    const double tol = value_tolerance(std::abs(f_xi.value()));

    std::optional<Counterexample> best;
    for (int trial = 0; trial < options.trials; ++trial) {
        std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(trial))));
        const int pieces = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(options.max_pieces - 1));

        std::vector<double> cuts;
        for (int k = 0; k + 1 < pieces; ++k) cuts.push_back(unit(rng));
        std::sort(cuts.begin(), cuts.end());
        std::vector<double> t{0.0};
        for (double c : cuts)
            if (c - t.back() > 1e-6) t.push_back(c);
        if (1.0 - t.back() <= 1e-6) t.pop_back();
        t.push_back(1.0);
        if (t.size() < 3) continue;

        std::vector<double> slopes(t.size() - 1);
        double mean = 0.0;
        for (std::size_t k = 0; k < slopes.size(); ++k) {
            slopes[k] = options.amplitude * (2.0 * unit(rng) - 1.0);
            mean += (t[k + 1] - t[k]) * slopes[k];
        }
        for (double& s : slopes) s -= mean;

        Counterexample cex;
        cex.trial = static_cast<std::uint64_t>(trial);
        cex.breakpoints = t;
        cex.values.assign(t.size(), 0.0);
        for (std::size_t k = 0; k + 1 < t.size(); ++k) cex.values[k + 1] = cex.values[k] + (t[k + 1] - t[k]) * slopes[k];
        cex.values.back() = 0.0;
        // slopes from the stored values
        for (std::size_t k = 0; k < slopes.size(); ++k)
            slopes[k] = (cex.values[k + 1] - cex.values[k]) / (t[k + 1] - t[k]);
        cex.slopes = slopes;
        cex.f_at_xi = f_xi.value();

        ExtendedValue sup = ExtendedValue::finite(-std::numeric_limits<double>::max());
        for (double s : slopes) sup = max(sup, f(xi + s));
        if (sup.is_infinite()) continue;
        cex.sup_value = sup.value();
        if (cex.gap() > tol && (!best || cex.gap() > best->gap())) best = std::move(cex);
    }
    return best;
}

double reevaluate_gap(const FunctionSpec& f, double xi, const Counterexample& cex) {
    if (cex.breakpoints.size() != cex.values.size() || cex.breakpoints.size() < 2)
        throw std::invalid_argument("malformed counterexample");
    if (cex.values.front() != 0.0 || cex.values.back() != 0.0)
        throw std::invalid_argument("counterexample does not vanish at the boundary");
    ExtendedValue sup = ExtendedValue::finite(-std::numeric_limits<double>::max());
    for (std::size_t k = 0; k + 1 < cex.breakpoints.size(); ++k) {
        const double s = (cex.values[k + 1] - cex.values[k]) / (cex.breakpoints[k + 1] - cex.breakpoints[k]);
        sup = max(sup, f(xi + s));
    }
    const ExtendedValue fx = f(xi);
    if (fx.is_infinite()) return std::numeric_limits<double>::infinity();
    if (sup.is_infinite()) return -std::numeric_limits<double>::infinity();
    return fx.value() - sup.value();
}

}  // namespace supenv::variational
