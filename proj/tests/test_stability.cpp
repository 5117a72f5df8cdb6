#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"
#include "itm/stability.hpp"

using namespace itm;
using namespace itm::testing;

TEST_CASE("the r=2 fixture is stable") {
    StabilityReport rep = stability_report(m2(), stabilization_budget(m2()));
    CHECK(rep.attractor.finite_type);
    CHECK(rep.a1);
    CHECK(rep.a2);
    CHECK(rep.a3_pass);
    CHECK(rep.matching);
    CHECK(rep.unstable_number == 0);
    CHECK(rep.verdict == Verdict::stable);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.components[0].cls == ComponentClass::dynamically_non_trivial);
    CHECK(rep.components[0].rm.N == 2);

    MatchingIdentities mi =
        matching_identities_check(m2(), rep.components[0].rm, 100);
    CHECK(mi.boundary_images);
    CHECK(mi.second_returns);
    CHECK(mi.all());
}

TEST_CASE("the r=3 fixture is unstable through the ghost cycle") {
    StabilityReport rep = stability_report(m3(), stabilization_budget(m3()));
    CHECK(rep.attractor.finite_type);
    CHECK(rep.a1);
    CHECK(rep.a2);        // vacuous: the only component is trivial
    CHECK(rep.matching);  // likewise
    CHECK(!rep.a3_pass);
    REQUIRE(rep.a3.violations.size() == 2);
    CHECK(rep.unstable_number == 2);
    CHECK(rep.verdict == Verdict::unstable);
}

TEST_CASE("the identity map is stable") {
    ParamVector p = identity_map(4);
    StabilityReport rep = stability_report(p, stabilization_budget(p));
    CHECK(rep.attractor.finite_type);
    CHECK(rep.attractor.n_star == 0);
    CHECK(rep.verdict == Verdict::stable);
    CHECK(rep.unstable_number == 0);
    REQUIRE(rep.components.size() == 1);
    CHECK(rep.components[0].cls == ComponentClass::dynamically_trivial);
}

TEST_CASE("non finite type within budget stays undecided") {
    StabilityReport rep = stability_report(m3(), 1);
    CHECK(rep.verdict == Verdict::undecided);
    CHECK(!rep.attractor.finite_type);
}

TEST_CASE("matching identities require N == 2") {
    AttractorResult a = compute_attractor(m3(), 10);
    ComponentsReport comps = components_and_boundary(m3(), a.X);
    ReturnMapData d = compute_return_map(m3(), a.X, comps.components[0], 10);
    CHECK_THROWS_AS(matching_identities_check(m3(), d, 100), Error);
}

TEST_CASE("verdicts agree with per-component flags on random maps") {
    std::mt19937 rng(41);
    int stable_seen = 0, unstable_seen = 0;
    for (int it = 0; it < 120; ++it) {
        ParamVector p = random_map(rng, 2 + it % 3, 12);
        StabilityReport rep = stability_report(p, stabilization_budget(p));
        REQUIRE(rep.attractor.finite_type);
        bool all = rep.a1 && rep.a2 && rep.a3_pass && rep.matching;
        CHECK(rep.verdict == (all ? Verdict::stable : Verdict::unstable));
        // a vanishing unstable number plus the correspondence forces the
        // first three structural conditions
        if (rep.unstable_number == 0 &&
            correspondence_report(p, rep.attractor.X, 4 * stabilization_budget(p))
                .all_hold()) {
            CHECK(rep.a1);
            CHECK(rep.a2);
            CHECK(rep.matching);
        }
        if (rep.verdict == Verdict::stable) {
            ++stable_seen;
            for (const auto& c : rep.components)
                if (c.cls == ComponentClass::dynamically_non_trivial) {
                    MatchingIdentities mi = matching_identities_check(
                        p, c.rm, 4 * stabilization_budget(p));
                    CHECK(mi.all());
                }
        } else {
            ++unstable_seen;
        }
    }
    CHECK(stable_seen > 0);
    CHECK(unstable_seen > 0);
}
