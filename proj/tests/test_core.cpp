#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>

#include "battery/battery.hpp"
#include "core/function.hpp"
#include "core/parallel.hpp"

using namespace supenv;

TEST_CASE("extended arithmetic follows the (-inf, +inf] conventions") {
    const auto one = ExtendedValue::finite(1.0);
    const auto zero = ExtendedValue::finite(0.0);
    CHECK((kInfinity + one).is_infinite());
    CHECK((kInfinity - one).is_infinite());
    CHECK((kInfinity * ExtendedValue::finite(2.0)).is_infinite());
    CHECK_THROWS_AS(kInfinity - kInfinity, DomainError);
    CHECK_THROWS_AS(one - kInfinity, DomainError);
    CHECK_THROWS_AS(zero * kInfinity, DomainError);
    CHECK_THROWS_AS(ExtendedValue::finite(-1.0) * kInfinity, DomainError);
    CHECK_THROWS_AS(-kInfinity, DomainError);
    CHECK_THROWS_AS(ExtendedValue::from_double(-HUGE_VAL), DomainError);
    CHECK_THROWS_AS(ExtendedValue::from_double(std::nan("")), DomainError);
    CHECK(ExtendedValue::from_double(HUGE_VAL) == kInfinity);
    CHECK_THROWS_AS(kInfinity.value(), DomainError);
}

TEST_CASE("extended order puts +inf above every finite value") {
    const auto big = ExtendedValue::finite(1e308);
    CHECK(big < kInfinity);
    CHECK(kInfinity == kInfinity);
    CHECK(max(big, kInfinity) == kInfinity);
    CHECK(min(big, kInfinity) == big);
    CHECK(root(kInfinity, 3).is_infinite());
    CHECK(root(ExtendedValue::finite(8.0), 3).value() == doctest::Approx(2.0));
    CHECK_THROWS_AS(root(ExtendedValue::finite(-1.0), 2), DomainError);
}

TEST_CASE("grid nodes and flat indices") {
    BoxGrid g(-2.0, 2.0, 5);
    CHECK(g.size() == 5);
    CHECK(g.spacing(0) == 1.0);
    CHECK(g.node(0)[0] == -2.0);
    CHECK(g.node(4)[0] == 2.0);

    BoxGrid g2({0.0, 0.0}, {1.0, 2.0}, {3, 5});
    CHECK(g2.size() == 15);
    CHECK(g2.flat_index(2, 1) == 5);
    CHECK(g2.multi_index(5) == std::array<int, 2>{2, 1});
    CHECK(g2.node(5) == Point{{1.0, 0.5}});
    CHECK(g2.extent() == 2.0);

    BoxGrid far = g.scaled(10.0);
    CHECK(far.lo(0) == -20.0);
    CHECK(far.hi(0) == 20.0);
    CHECK(far.nodes(0) == 5);
    CHECK_THROWS_AS(g.scaled(0.5), std::invalid_argument);
    CHECK_THROWS_AS(BoxGrid(1.0, 1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(BoxGrid(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("battery grids carry exact nodes at 0 and 1") {
    for (const auto& e : battery::entries()) {
        CAPTURE(e.name);
        const BoxGrid g = e.grid();
        for (int axis = 0; axis < g.dim(); ++axis) {
            bool zero = false, one = false;
            for (int i = 0; i < g.nodes(axis); ++i) {
                zero = zero || g.coordinate(axis, i) == 0.0;
                one = one || g.coordinate(axis, i) == 1.0;
            }
            CHECK(zero);
            CHECK(one);
        }
    }
}

TEST_CASE("sampling and combinators") {
    FunctionSpec f("id", 1, [](const Point& p) { return ExtendedValue::finite(p[0]); });
    BoxGrid g(-2.0, 2.0, 5);
    auto s = sample(f, g);
    CHECK(s[0].value() == -2.0);
    CHECK(s.min_value().value() == -2.0);
    CHECK(s.value_scale() == 2.0);

    auto t = truncate_below(f, 1.0);
    CHECK(t(-2.0).value() == -1.0);
    CHECK(t(0.5).value() == 0.5);
    CHECK_THROWS_AS(truncate_below(f, -1.0), std::invalid_argument);

    auto c = coercify(f, 2);
    CHECK(c.coercive());
    CHECK(c(-2.0).value() == 1.0);
    CHECK(c(2.0).value() == 2.0);
    CHECK_THROWS_AS(coercify(f, 0), std::invalid_argument);

    auto inf = FunctionSpec("inf", 1, [](const Point&) { return kInfinity; });
    CHECK(compose_phi(inf)(0.0).value() == doctest::Approx(std::numbers::pi / 2));
    CHECK(compose_phi(f)(1.0).value() == doctest::Approx(std::atan(1.0)));

    BoxGrid g2({0, 0}, {1, 1}, {2, 2});
    CHECK_THROWS_AS(sample(f, g2), std::invalid_argument);
    CHECK(constant_function(3.0, 2)(Point{{5.0, 1.0}}).value() == 3.0);
    CHECK(euclidean_norm(Point{{3.0, 4.0}}, 2) == 5.0);
}

TEST_CASE("parallel_for visits each index once and propagates exceptions") {
    for (int threads : {1, 3}) {
        set_thread_count(threads);
        std::vector<int> hits(10000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        CHECK_THROWS_AS(parallel_for(5000, [](std::size_t i) {
                            if (i == 4321) throw std::runtime_error("boom");
                        }),
                        std::runtime_error);
    }
    set_thread_count(0);
}
