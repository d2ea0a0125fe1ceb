#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "conefield/core_types.hpp"

using namespace conefield;

TEST_CASE("sphere areas for the small dimensions") {
    CHECK(sphere_area(Dimension(2)) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(sphere_area(Dimension(3)) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(sphere_area(Dimension(4)) ==
          doctest::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
}

TEST_CASE("sphere_area times c_N is one") {
    for (int n = 2; n <= 8; ++n) {
        const Dimension d(n);
        CHECK(std::abs(d.sphere_area() * d.c_n() - 1.0) < 1e-14);
    }
}

TEST_CASE("dimension below two is rejected") {
    CHECK_THROWS_AS(Dimension(1), std::invalid_argument);
}

TEST_CASE("min_pole_gap on simple pairs") {
    const Dimension d2(2);
    {
        PoleConfig cfg(d2, {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}}, 4.0);
        const auto g = min_pole_gap(cfg);
        REQUIRE(g.has_value());
        CHECK(g->min_gap == doctest::Approx(1.0));
        CHECK_FALSE(g->cross_sign_gap.has_value());
    }
    {
        PoleConfig cfg(d2, {{{0.0, 0.0}, 1.0}, {{3.0, 4.0}, 2.0}}, 11.0);
        const auto g = min_pole_gap(cfg);
        REQUIRE(g.has_value());
        CHECK(g->min_gap == doctest::Approx(5.0));
    }
}

TEST_CASE("cross-sign gap l0 is exposed for mixed weights") {
    const Dimension d2(2);
    PoleConfig cfg(d2,
                   {{{0.0, 0.0}, 1.0}, {{1.0, 0.0}, 1.0}, {{0.0, 2.0}, -1.0}},
                   7.0);
    const auto g = min_pole_gap(cfg);
    REQUIRE(g.has_value());
    CHECK(g->min_gap == doctest::Approx(1.0));
    REQUIRE(g->cross_sign_gap.has_value());
    CHECK(*g->cross_sign_gap == doctest::Approx(2.0));
}

TEST_CASE("gap is undefined for a single pole") {
    PoleConfig cfg(Dimension(2), {{{0.0, 0.0}, 1.0}}, 1.0);
    CHECK_FALSE(min_pole_gap(cfg).has_value());
}

TEST_CASE("gap is invariant under pole permutation") {
    const Dimension d2(2);
    std::vector<Pole> poles{{{0.1, 0.2}, 1.0},
                            {{-0.4, 0.3}, 2.0},
                            {{0.5, -0.5}, -0.5}};
    PoleConfig a(d2, poles, 4.0);
    std::swap(poles[0], poles[2]);
    PoleConfig b(d2, poles, 4.0);
    CHECK(min_pole_gap(a)->min_gap == doctest::Approx(min_pole_gap(b)->min_gap));
    CHECK(*min_pole_gap(a)->cross_sign_gap ==
          doctest::Approx(*min_pole_gap(b)->cross_sign_gap));
}

TEST_CASE("pole config invariants are enforced") {
    const Dimension d2(2);
    CHECK_THROWS_AS(PoleConfig(d2, {{{0.0, 0.0}, 0.0}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        PoleConfig(d2, {{{0.0, 0.0}, 1.0}, {{0.0, 0.0}, 2.0}}, 1.0),
        std::invalid_argument);
    // |p| must stay below R0/2
    CHECK_THROWS_AS(PoleConfig(d2, {{{0.9, 0.0}, 1.0}}, 1.0),
                    std::invalid_argument);
    // dimension mismatch
    CHECK_THROWS_AS(PoleConfig(d2, {{{0.0, 0.0, 0.0}, 1.0}}, 1.0),
                    std::invalid_argument);
}

TEST_CASE("signed masses split by sign") {
    PoleConfig cfg(Dimension(3),
                   {{{0.0, 0.0, 0.0}, 2.0},
                    {{1.0, 0.0, 0.0}, 0.5},
                    {{0.0, 1.0, 0.0}, -1.5}},
                   4.0);
    CHECK(cfg.positive_mass() == doctest::Approx(2.5));
    CHECK(cfg.negative_mass() == doctest::Approx(1.5));
    CHECK(cfg.net_mass() == doctest::Approx(1.0));
    CHECK(cfg.mixed_signs());
}
