// Self-checks for the reference computations in tests/support.

#include "doctest.h"
#include "oracle.hpp"

using namespace oracle;

TEST_CASE("vertex enumeration on a textbook LP") {
    // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3  ->  (3, 1), value 11
    SmallLp lp{{-3, -2}, {{1, 1}, {1, 3}, {1, 0}}, {Rel::Le, Rel::Le, Rel::Le}, {4, 6, 3}};
    const auto v = vertex_enumeration(lp);
    REQUIRE(v.has_value());
    CHECK(v->value == doctest::Approx(-11));
    CHECK(v->x[0] == doctest::Approx(3));
    CHECK(v->x[1] == doctest::Approx(1));
}

TEST_CASE("vertex enumeration reports infeasibility") {
    SmallLp lp{{1}, {{1}, {1}}, {Rel::Le, Rel::Ge}, {1, 2}};
    CHECK_FALSE(vertex_enumeration(lp).has_value());
}

TEST_CASE("brute-force alpha on hand-solved instances") {
    CHECK(brute_force_alpha({{0.3, 0.7}}) == doctest::Approx(1.0));
    CHECK(brute_force_alpha({{0.6, 0.4}, {0.3, 0.7}}) == doctest::Approx(1.0));
    CHECK(brute_force_alpha({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}}) ==
          doctest::Approx(4.0 / 3).epsilon(1e-9));
}
