#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"

using namespace itm;
using namespace itm::testing;

TEST_CASE("fixture attractors") {
    AttractorResult a = compute_attractor(m2(), stabilization_budget(m2()));
    REQUIRE(a.finite_type);
    CHECK(a.n_star == 1);
    CHECK(a.X == IntervalSet::single(Rat(0), Rat(3, 4)));

    a = compute_attractor(m3(), stabilization_budget(m3()));
    REQUIRE(a.finite_type);
    CHECK(a.n_star == 2);
    CHECK(a.X == IntervalSet::single(Rat(1, 3), Rat(2, 3)));
}

TEST_CASE("stabilization budget") {
    CHECK(stabilization_budget(m2()) == 5);
    CHECK(stabilization_budget(m3()) == 4);
    ParamVector p = m2();
    p.gamma[0] = Rat(1, 3'000'000);
    CHECK_THROWS_AS(stabilization_budget(p), Error);
}

TEST_CASE("attractor chain is strictly decreasing until stabilization") {
    AttractorResult a = compute_attractor(m3(), 100);
    for (size_t k = 1; k < a.chain.size(); ++k) {
        CHECK(a.chain[k].subset_of(a.chain[k - 1]));
        CHECK(a.chain[k].measure() < a.chain[k - 1].measure());
    }
}

TEST_CASE("random maps stabilize and agree with the grid simulation") {
    std::mt19937 rng(23);
    for (int it = 0; it < 200; ++it) {
        ParamVector p = random_map(rng, 2 + it % 3, 12);
        long budget = stabilization_budget(p);
        AttractorResult a = compute_attractor(p, budget);
        REQUIRE(a.finite_type);
        CHECK(image_interval_set(p, a.X) == a.X);
        CHECK(a.X == grid_attractor(p, budget));
        CHECK(a.X.measure() > 0);
    }
}

TEST_CASE("components and boundary criticals") {
    ParamVector p = m2();
    AttractorResult a = compute_attractor(p, 10);
    ComponentsReport rep = components_and_boundary(p, a.X);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.components[0].lo == Rat(0));
    CHECK(rep.components[0].hi == Rat(3, 4));
    CHECK(rep.boundary_criticals.empty());
    REQUIRE(rep.signed_membership.size() == 2);
    CHECK(rep.signed_membership[0].in_x);  // 1/2^-
    CHECK(rep.signed_membership[1].in_x);  // 1/2^+

    p = m3();
    a = compute_attractor(p, 10);
    rep = components_and_boundary(p, a.X);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.boundary_criticals == std::set<int>{1, 2});
    // 1/3^- out, 1/3^+ in, 2/3^- in, 2/3^+ out
    CHECK(!rep.signed_membership[0].in_x);
    CHECK(rep.signed_membership[1].in_x);
    CHECK(rep.signed_membership[2].in_x);
    CHECK(!rep.signed_membership[3].in_x);

    CHECK_THROWS_AS(components_and_boundary(p, IntervalSet::unit()), Error);
}
