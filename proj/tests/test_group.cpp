// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include "sdf/group.hpp"

using namespace sdf;

TEST_CASE("cyclic group laws") {
    Group g = Group::cyclic(6);
    auto elems = g.enumerate();
    REQUIRE(elems.size() == 6);
    for (int a : elems)
        for (int b : elems) {
            REQUIRE(g.add(a, b) == g.add(b, a));
            REQUIRE(g.add(a, g.neg(a)) == g.zero());
            for (int c : elems) REQUIRE(g.add(g.add(a, b), c) == g.add(a, g.add(b, c)));
        }
}

TEST_CASE("boolean group laws") {
    Group g = Group::boolean(3);
    REQUIRE(g.order() == 8);
    for (int a = 0; a < 8; ++a) {
        REQUIRE(g.neg(a) == a);
        REQUIRE(g.add(a, a) == 0);
        for (int b = 0; b < 8; ++b) REQUIRE(g.add(a, b) == (a ^ b));
    }
}

TEST_CASE("difference closure") {
    Group z4 = Group::cyclic(4);
    REQUIRE(z4.difference_closed({0, 2}));
    REQUIRE(z4.difference_closed({1, 3}));  // coset of {0,2}
    REQUIRE_FALSE(z4.difference_closed({0, 1}));
    Group b2 = Group::boolean(2);
    REQUIRE(b2.difference_closed({0, 3}));
    REQUIRE_FALSE(b2.difference_closed({1, 2, 3}));
}

TEST_CASE("rejects bad orders") {
    REQUIRE_THROWS_AS(Group::cyclic(0), error);
    REQUIRE_THROWS_AS(Group::cyclic(5).add(5, 0), error);
}
