#include <doctest.h>

#include "battery/battery.hpp"
#include "variational/variational.hpp"

using namespace supenv;
using namespace supenv::variational;

namespace {

FunctionSpec named(const char* n) { return battery::find(n).function(); }

// Enumerates every slope assignment whose index sum hits the terminal band.
double exhaustive_min(const BVProblem& pr, double p) {
    const int n = pr.intervals, m = pr.slopes.count;
    const double target = n * (pr.mean_slope() - pr.slopes.lo) / pr.slopes.step();
    const double snapped = std::round(target);
    int band_lo, band_hi;
    if (std::abs(target - snapped) <= 1e-6) band_lo = band_hi = static_cast<int>(snapped);
    else band_lo = static_cast<int>(std::floor(target)), band_hi = band_lo + 1;

    std::vector<int> piece_of;
    for (std::size_t k = 0; k < pr.pieces.size(); ++k)
        for (int c = 0; c < pr.pieces[k].cells; ++c) piece_of.push_back(static_cast<int>(k));

    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    double best = HUGE_VAL;
    while (true) {
        int sum = 0;
        for (int v : idx) sum += v;
        if (sum >= band_lo && sum <= band_hi) {
            double acc = 0.0;
            bool finite = true;
            for (int i = 0; i < n; ++i) {
                auto v = pr.pieces[piece_of[i]].f(pr.slopes.slope(idx[i]));
                if (v.is_infinite()) finite = false;
                else acc += std::pow(v.value(), p);
            }
            if (finite) best = std::min(best, std::pow(acc / n, 1.0 / p));
        }
        int pos = 0;
        while (pos < n && ++idx[pos] == m) idx[pos++] = 0;
        if (pos == n) break;
    }
    return best;
}

}  // namespace

TEST_CASE("dp agrees with exhaustive enumeration") {
    SlopeGrid s{-2.0, 2.0, 9};
    for (const char* name : {"doublewell", "abs", "step", "twopoint"}) {
        for (double b : {0.0, 0.5, 0.25, 1.0, -1.5}) {
            auto pr = BVProblem::single(named(name), 0.0, b, 3, s);
            for (double p : {1.0, 2.0, 8.0}) {
                CAPTURE(name);
                CAPTURE(b);
                CAPTURE(p);
                const double want = exhaustive_min(pr, p);
                if (std::isinf(want)) {
                    CHECK_THROWS_AS(lp_min_dp(pr, p), std::invalid_argument);
                } else {
                    CHECK(lp_min_dp(pr, p) == doctest::Approx(want).epsilon(1e-9).scale(1.0));
                }
            }
        }
    }
    BVProblem two;
    two.pieces = {{named("doublewell"), 2}, {named("abs"), 2}};
    two.a = 0.0;
    two.b = 0.5;
    two.intervals = 4;
    two.slopes = s;
    for (double p : {1.0, 4.0}) CHECK(lp_min_dp(two, p) == doctest::Approx(exhaustive_min(two, p)).epsilon(1e-9).scale(1.0));
}

TEST_CASE("dp worked values") {
    CHECK(lp_min_dp(BVProblem::single(named("abs"), 0.0, 1.0), 4.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_min_dp(BVProblem::single(named("doublewell"), 0.0, 0.0), 1.0) == 0.0);
    // Equal slopes 1.5: (2.25 - 1)^2.
    CHECK(lp_min_dp(BVProblem::single(named("doublewell"), 0.0, 1.5), 64.0) == doctest::Approx(1.5625).epsilon(1e-9));
    CHECK_THROWS_AS(lp_min_dp(BVProblem::single(named("abs"), 0.0, 1.0), 0.5), std::invalid_argument);
    FunctionSpec neg("neg", 1, [](const Point& p) { return ExtendedValue::finite(p[0]); });
    CHECK_THROWS_AS(lp_min_dp(BVProblem::single(neg, 0.0, 1.0), 1.0), DomainError);
}

TEST_CASE("relaxed minima") {
    BoxGrid g(-2.0, 2.0, 401);
    CHECK(supremal_relaxed_min(named("abs"), 0.0, 1.0, g).value() == doctest::Approx(1.0));
    CHECK(supremal_relaxed_min(named("doublewell"), 0.0, 0.0, g).value() == 0.0);
    CHECK(std::abs(supremal_relaxed_min(named("spike"), 0.0, 0.0, g).value()) <= 1e-9);
    CHECK_THROWS_AS(supremal_relaxed_min(named("abs"), 0.0, 3.0, g), std::invalid_argument);

    BVProblem two;
    two.pieces = {{named("doublewell"), 32}, {named("abs"), 32}};
    two.a = 0.0;
    two.b = 0.0;
    two.intervals = 64;
    CHECK(piecewise_relaxed_min(two).value() == 0.0);
    auto single = BVProblem::single(named("abs"), 0.0, 1.0);
    CHECK(piecewise_relaxed_min(single).value() == doctest::Approx(1.0));
}

TEST_CASE("gamma-min sweep on the double well") {
    auto pr = BVProblem::single(named("doublewell"), 0.0, 0.5);
    auto r = gamma_min_sweep(pr, {1, 2, 4, 8, 16, 32, 64});
    CHECK(r.minima_monotone);
    CHECK(r.gaps_nonincreasing);
    CHECK(r.final_gap_ok);
    CHECK(r.matches_biconjugate);
    CHECK(r.passed());
    CHECK(r.relaxed_min.value() == 0.0);
    for (std::size_t k = 0; k < r.minima.size(); ++k) CHECK(std::abs(r.minima[k] - r.biconjugate[k]) <= kTolMin);

    auto a = gamma_min_sweep(BVProblem::single(named("abs"), 0.0, 1.0), {1, 8, 64});
    for (double m : a.minima) CHECK(m == doctest::Approx(1.0));
    for (double gap : a.gaps) CHECK(std::abs(gap) <= 1e-9);
    CHECK_THROWS_AS(gamma_min_sweep(pr, {}), std::invalid_argument);
    CHECK_THROWS_AS(gamma_min_sweep(pr, {2, 1}), std::invalid_argument);
}

TEST_CASE("problem validation") {
    CHECK_THROWS_AS(BVProblem::single(named("abs"), 0.0, 3.0), std::invalid_argument);
    CHECK_THROWS_AS(BVProblem::single(named("abs"), 0.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(BVProblem::single(named("chi"), 0.0, 1.0), std::invalid_argument);
    BVProblem bad;
    bad.pieces = {{named("abs"), 10}};
    bad.intervals = 64;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("recovery sequences") {
    auto in = recovery_sequence(-1.0, 1.0, 0.5, 7);
    CHECK(in.sup_deviation == 0.0);
    CHECK(in.slopes_inside());
    auto edge = recovery_sequence(-1.0, 1.0, 1.0, 10);
    REQUIRE(edge.slopes.size() >= 1);
    for (double s : edge.slopes) CHECK(s == doctest::Approx(0.9));
    CHECK(edge.sup_deviation == doctest::Approx(0.1));
    CHECK(edge.values.back() == doctest::Approx(0.9));
    auto low = recovery_sequence(-1.0, 1.0, -1.0, 4);
    CHECK(low.slopes_inside());
    CHECK(low.sup_deviation == doctest::Approx(0.25));
    for (int n = 1; n <= 64; ++n)
        for (double xi : {-1.0, -0.5, 0.0, 0.9, 1.0}) {
            auto r = recovery_sequence(-1.0, 1.0, xi, n);
            CHECK(r.slopes_inside());
            CHECK(r.sup_deviation <= 2.0 / n);
        }
    CHECK_THROWS_AS(recovery_sequence(-1.0, 1.0, 1.5, 3), std::invalid_argument);
    CHECK_THROWS_AS(recovery_sequence(1.0, -1.0, 0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(recovery_sequence(-1.0, 1.0, 0.0, 0), std::invalid_argument);
}

TEST_CASE("falsifier") {
    FalsifyOptions o;
    o.trials = 2000;
    o.seed = 42;
    auto dw = weak_morrey_falsify(named("doublewell"), 0.0, o);
    REQUIRE(dw);
    CHECK(dw->gap() >= 0.5);
    CHECK(reevaluate_gap(named("doublewell"), 0.0, *dw) == doctest::Approx(dw->gap()).epsilon(1e-12));
    CHECK(dw->breakpoints.front() == 0.0);
    CHECK(dw->breakpoints.back() == 1.0);
    CHECK(dw->values.front() == 0.0);
    CHECK(std::abs(dw->values.back()) == 0.0);

    auto again = weak_morrey_falsify(named("doublewell"), 0.0, o);
    REQUIRE(again);
    CHECK(again->trial == dw->trial);
    CHECK(again->breakpoints == dw->breakpoints);
    CHECK(again->values == dw->values);

    CHECK_FALSE(weak_morrey_falsify(named("abs"), 0.3, o));
    CHECK_FALSE(weak_morrey_falsify(constant_function(2.0, 1), 0.0, o));

    Counterexample broken = *dw;
    broken.values.back() = 0.5;
    CHECK_THROWS_AS(reevaluate_gap(named("doublewell"), 0.0, broken), std::invalid_argument);
    o.trials = 0;
    CHECK_THROWS_AS(weak_morrey_falsify(named("abs"), 0.0, o), std::invalid_argument);
    CHECK_THROWS_AS(weak_morrey_falsify(named("interval"), 1.5, {}), std::invalid_argument);
}
