#include <doctest.h>

#include <random>

#include "battery/battery.hpp"
#include "envelopes/envelopes.hpp"

using namespace supenv;
using namespace supenv::envelopes;

namespace {

FunctionSpec expr_of(const char* name) { return battery::find(name).function(); }

// Piecewise-constant extension of node values: every point takes the value of
// its nearest node (ties toward the upper node).
FunctionSpec table(const BoxGrid& g, std::vector<ExtendedValue> vals) {
    auto shared = std::make_shared<std::vector<ExtendedValue>>(std::move(vals));
    return FunctionSpec("table", g.dim(), [g, shared](const Point& p) {
        int idx[2] = {0, 0};
        for (int a = 0; a < g.dim(); ++a) {
            int i = static_cast<int>(std::floor((p[a] - g.lo(a)) / g.spacing(a) + 0.5));
            idx[a] = std::clamp(i, 0, g.nodes(a) - 1);
        }
        return (*shared)[g.flat_index(idx[0], idx[1])];
    });
}

// lc at node i in 1D: min over j <= i <= k of max(f_j, f_k).
std::vector<ExtendedValue> lc_oracle_1d(const std::vector<ExtendedValue>& v) {
    std::vector<ExtendedValue> out(v.size(), kInfinity);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j)
            for (std::size_t k = i; k < v.size(); ++k) out[i] = min(out[i], max(v[j], v[k]));
    return out;
}

// lc at every node in 2D by scanning all levels with explicit hulls.
std::vector<ExtendedValue> lc_oracle_2d(const BoxGrid& g, const std::vector<ExtendedValue>& v) {
    std::vector<double> levels;
    for (const auto& x : v)
        if (x.is_finite()) levels.push_back(x.value());
    std::sort(levels.begin(), levels.end());
    std::vector<ExtendedValue> out(v.size(), kInfinity);
    for (double lambda : levels) {
        std::vector<Point> mask;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i].is_finite() && v[i].value() <= lambda) mask.push_back(g.node(i));
        auto hull = geometry::convex_hull(mask, 2);
        for (std::size_t i = 0; i < v.size(); ++i)
            if (out[i].is_infinite() && geometry::contains(hull, g.node(i), 1e-9 * g.extent()))
                out[i] = ExtendedValue::finite(lambda);
    }
    return out;
}

}  // namespace

TEST_CASE("lc sweep matches the chord scan on random 1D tables") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> level(0, 9);
    for (int trial = 0; trial < 25; ++trial) {
        BoxGrid g(-1.0, 1.0, 31);
        std::vector<ExtendedValue> v;
        for (std::size_t i = 0; i < g.size(); ++i) {
            int l = level(rng);
            v.push_back(l == 9 ? kInfinity : ExtendedValue::finite(0.25 * l));
        }
        auto got = lc_envelope(table(g, v), g);
        auto want = lc_oracle_1d(v);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(got[i] == want[i]);
        }
    }
}

TEST_CASE("lc sweep matches explicit hull scans on random 2D tables") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> level(0, 12);
    for (int trial = 0; trial < 10; ++trial) {
        BoxGrid g({-1.0, -1.0}, {1.0, 1.0}, {9, 9});
        std::vector<ExtendedValue> v;
        for (std::size_t i = 0; i < g.size(); ++i) {
            int l = level(rng);
            v.push_back(l >= 11 ? kInfinity : ExtendedValue::finite(l));
        }
        auto got = lc_envelope(table(g, v), g);
        auto want = lc_oracle_2d(g, v);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CAPTURE(trial);
            CAPTURE(i);
            CHECK(got[i] == want[i]);
        }
    }
}

TEST_CASE("double well: ls is f, lc flattens the wells") {
    BoxGrid g(-2.0, 2.0, 401);
    auto f = expr_of("doublewell");
    auto fs = sample(f, g);
    auto ls = ls_envelope(f, g);
    auto lc = lc_envelope(f, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        CHECK(ls[i].value() == doctest::Approx(fs[i].value()).epsilon(1e-9));
        if (std::abs(x) <= 1.0) CHECK(lc[i].value() == 0.0);
        else CHECK(lc[i].value() == doctest::Approx(fs[i].value()).epsilon(1e-9));
    }
}

TEST_CASE("spike: ls and lc both remove the isolated value") {
    BoxGrid g(-2.0, 2.0, 801);
    auto f = expr_of("spike");
    auto ls = ls_envelope(f, g);
    auto lc = lc_envelope(f, g);
    auto lslc = lslc_envelope(f, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = std::abs(g.node(i)[0]);
        CHECK(std::abs(ls[i].value() - x) <= 1e-9);
        CHECK(std::abs(lc[i].value() - x) <= 1e-9);
        CHECK(std::abs(lslc[i].value() - x) <= 1e-9);
    }
}

TEST_CASE("chi: ls keeps the set C and lslc is the strip indicator") {
    BoxGrid g({-2.0, -2.0}, {2.0, 2.0}, {41, 41});
    EnvelopeOptions o;
    o.far_field = 2000.0;
    auto f = expr_of("chi");
    auto ls = ls_envelope(f, g, o);
    auto lslc = lslc_envelope(f, g, o);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point p = g.node(i);
        const bool in_c = p[1] == 0.0 || (p[0] == 0.0 && p[1] == 1.0);
        CHECK(ls[i].value() == (in_c ? 0.0 : 1.0));
        const bool in_strip = p[1] >= 0.0 && p[1] <= 1.0;
        CHECK(lslc[i].value() == (in_strip ? 0.0 : 1.0));
    }
}

TEST_CASE("constants and level convex inputs are fixed points") {
    BoxGrid g(-2.0, 2.0, 81);
    auto lc = lc_envelope(constant_function(2.5, 1), g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(lc[i].value() == 2.5);
    auto f = expr_of("abs");
    auto fs = sample(f, g);
    auto lslc = lslc_envelope(f, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(lslc[i].value() - fs[i].value()) <= 1e-9);
}

TEST_CASE("sublevel hulls") {
    BoxGrid g(-2.0, 2.0, 401);
    // (x^2 - 1)^2 <= eps  <=>  |x| <= sqrt(1 + sqrt(eps))
    auto well = sublevel_lslc(expr_of("doublewell"), g, 0.0, 0.01);
    CHECK(std::abs(well.upper() - std::sqrt(1.1)) <= g.spacing(0));
    CHECK(well.lower() == -well.upper());
    BoxGrid coarse(-2.0, 2.0, 81);
    auto rough = sublevel_lslc(expr_of("doublewell"), coarse, 0.0, 0.01);
    CHECK(std::abs(rough.lower() + 1.0) <= 2 * coarse.spacing(0));
    CHECK(std::abs(rough.upper() - 1.0) <= 2 * coarse.spacing(0));

    auto a = sublevel_lslc(expr_of("abs"), g, 0.5, 0.02);
    CHECK(a.lower() <= -0.5);
    CHECK(a.upper() >= 0.5);
    CHECK(a.upper() <= 0.52 + 1e-12);

    CHECK(sublevel_lslc(expr_of("abs"), g, -1.0, 0.5).is_empty());
    CHECK_THROWS_AS(sublevel_lslc(expr_of("abs"), g, 0.0, 0.0), std::invalid_argument);

    auto ladder = sublevel_ladder(expr_of("doublewell"), g, 0.0);
    REQUIRE(ladder.eps.size() == 3);
    CHECK(ladder.eps[0] > ladder.eps[1]);
    CHECK(ladder.monotone);
}

TEST_CASE("effective domain hull") {
    BoxGrid g(-2.0, 2.0, 401);
    // The lsc stencil reaches half a cell past the box.
    const double half = g.spacing(0) / 2;
    auto all = effective_domain_hull(expr_of("abs"), g);
    CHECK(all.lower() == doctest::Approx(-2.0 - half));
    CHECK(all.upper() == doctest::Approx(2.0 + half));

    auto f = expr_of("twopoint");
    auto two = effective_domain_hull(f, g);
    CHECK(two.lower() == -1.0);
    CHECK(two.upper() == 1.0);
    auto lc = lc_envelope(f, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i)[0];
        CHECK(lc[i].is_finite() == (std::abs(x) <= 1.0));
        if (std::abs(x) <= 1.0) CHECK(lc[i].value() == 0.0);
    }

    CHECK(effective_domain_hull(constant_function(0, 1).renamed("c"), g).lower() <= -2.0);
    FunctionSpec never("never", 1, [](const Point&) { return kInfinity; });
    CHECK(effective_domain_hull(never, g).is_empty());
    auto lc_never = lc_envelope(never, g);
    CHECK(lc_never.all_infinite());
}

TEST_CASE("hypothesis H") {
    BoxGrid g(-2.0, 2.0, 401);
    auto abs_r = check_hypothesis_H(expr_of("abs"), g, {0.1, 0.5, 1.0, 1.9});
    CHECK(abs_r.holds);
    CHECK(abs_r.probes.size() == 4);

    auto dw = check_hypothesis_H(expr_of("doublewell"), g, {0.5});
    CHECK_FALSE(dw.holds);
    REQUIRE(dw.failing_lambda);
    CHECK(*dw.failing_lambda == 0.5);
    REQUIRE(dw.witness);
    CHECK((*dw.witness)[0][0] * (*dw.witness)[1][0] < 0.0);
    REQUIRE(dw.violation);
    CHECK(std::abs((*dw.violation)[0]) < 0.8);

    auto spike = check_hypothesis_H(expr_of("spike"), g, {0.25});
    CHECK_FALSE(spike.holds);
    CHECK_FALSE(spike.probes[0].convex_ok);
    REQUIRE(spike.violation);
    CHECK((*spike.violation)[0] == 0.0);

    CHECK_THROWS_AS(check_hypothesis_H(expr_of("abs"), g, {}), std::invalid_argument);
    CHECK_THROWS_AS(check_hypothesis_H(expr_of("abs"), g, {-1.0}), std::invalid_argument);
}

TEST_CASE("arctan equivariance") {
    BoxGrid g(-2.0, 2.0, 201);
    for (const char* name : {"abs", "doublewell", "spike"}) {
        CAPTURE(name);
        auto r = phi_equivariance_check(expr_of(name), g);
        CHECK(r.ok);
        CHECK(r.masks_match);
        CHECK(r.max_gap <= r.tolerance);
    }
    CHECK(phi_equivariance_check(expr_of("abs"), g).max_gap <= 1e-12);
}

TEST_CASE("report ordering, infimum and validation") {
    BoxGrid g(-2.0, 2.0, 201);
    auto r = compute_envelopes(expr_of("upstep"), g);
    CHECK(r.ordering_ok);
    CHECK(r.infimum_ok);
    CHECK(r.domain_hull.lower() <= -2.0);
    CHECK(std::is_sorted(r.lambda_grid.begin(), r.lambda_grid.end()));

    EnvelopeOptions bad;
    bad.refine_depth = 9;
    CHECK_THROWS_AS(ls_envelope(expr_of("abs"), g, bad), std::invalid_argument);
    bad = {};
    bad.far_field = 0.5;
    CHECK_THROWS_AS(lc_envelope(expr_of("abs"), g, bad), std::invalid_argument);
    bad = {};
    bad.approach_depth = 3;
    CHECK_THROWS_AS(ls_envelope(expr_of("abs"), g, bad), std::invalid_argument);
    CHECK_THROWS_AS(ls_envelope(expr_of("chi"), g), std::invalid_argument);
}

TEST_CASE("upstep jump lands on the lower branch") {
    // f = |x| for x < 0, x + 1 for x >= 0: lsc envelope at 0 is 0, lc keeps it (level convex).
    BoxGrid g(-2.0, 2.0, 801);
    auto f = expr_of("upstep");
    auto ls = ls_envelope(f, g);
    const std::size_t zero = 400;
    CHECK(g.node(zero)[0] == 0.0);
    CHECK(std::abs(ls[zero].value()) <= 1e-9);
    CHECK(ls[zero + 1].value() == doctest::Approx(1.005));
    CHECK(sampled_infimum(f, g).value() <= 1e-9);
}
