#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"
#include "itm/critical.hpp"

using namespace itm;
using namespace itm::testing;

TEST_CASE("critical classification on the fixtures") {
    CriticalClassification cc = critical_classification(m2(), 100);
    REQUIRE(cc.entries.size() == 2);
    // both sides of 1/2 are periodic and never land after time 0
    CHECK(cc.entries[0].cls == CritClass::C2);
    CHECK(cc.entries[1].cls == CritClass::C2);

    cc = critical_classification(m3(), 100);
    REQUIRE(cc.entries.size() == 4);
    CHECK(cc.entries[0].pt == SignedPoint{Rat(1, 3), Side::minus});
    CHECK(cc.entries[0].cls == CritClass::C1);
    CHECK(cc.entries[0].witness_time == 1);
    CHECK(cc.entries[1].cls == CritClass::C2);  // 1/3^+ fixed
    CHECK(cc.entries[2].cls == CritClass::C2);  // 2/3^- fixed
    CHECK(cc.entries[3].cls == CritClass::C1);  // 2/3^+ lands on beta_1 at time 2
    CHECK(cc.entries[3].witness_time == 2);
}

TEST_CASE("cycles partition") {
    AttractorResult a2 = compute_attractor(m2(), 10);
    CyclePartition cp = cycles_partition(m2(), a2.X, 100);
    REQUIRE(cp.cycles.size() == 1);
    CHECK(cp.cycles[0] == std::vector<int>{1});

    AttractorResult a3 = compute_attractor(m3(), 10);
    cp = cycles_partition(m3(), a3.X, 100);
    REQUIRE(cp.cycles.size() == 2);
    CHECK(cp.cycles[0] == std::vector<int>{1});
    CHECK(cp.cycles[1] == std::vector<int>{2});
}

TEST_CASE("identity map criticals are fixed singleton cycles") {
    ParamVector p = identity_map(4);
    CriticalClassification cc = critical_classification(p, 10);
    for (const auto& e : cc.entries) {
        CHECK(e.cls == CritClass::C2);
        CHECK(e.witness_time == 1);
    }
    AttractorResult a = compute_attractor(p, 10);
    CyclePartition cp = cycles_partition(p, a.X, 10);
    REQUIRE(cp.cycles.size() == 3);
    for (size_t k = 0; k < cp.cycles.size(); ++k)
        CHECK(cp.cycles[k] == std::vector<int>{(int)k + 1});
    A3Result r = ghost_graph_and_a3(p, a.X, 10);
    CHECK(r.g.edges.empty());
    CHECK(r.pass());
    CHECK(unstable_number(p, a.X, 10) == 0);
    CHECK(correspondence_report(p, a.X, 10).all_hold());
}

TEST_CASE("maximal periodic interval") {
    // m2: 1/2^+ has period 3 with itinerary (2,1,1); the interval of that
    // itinerary is [1/2, 3/4)
    Interval P = maximal_periodic_interval(m2(), {Rat(1, 2), Side::plus}, 3);
    CHECK(P == Interval{Rat(1, 2), Rat(3, 4)});
    // every point of P closes up after 3 steps
    ParamVector p = m2();
    for (Rat v : {Rat(1, 2), Rat(5, 8), Rat(7, 10)}) {
        SignedPoint cur{v, Side::plus};
        for (int t = 0; t < 3; ++t) cur = apply(p, cur);
        CHECK(cur.value == v);
    }

    // m3: the fixed points
    P = maximal_periodic_interval(m3(), {Rat(1, 3), Side::plus}, 1);
    CHECK(P == Interval{Rat(1, 3), Rat(2, 3)});
    P = maximal_periodic_interval(m3(), {Rat(2, 3), Side::minus}, 1);
    CHECK(P == Interval{Rat(1, 3), Rat(2, 3)});

    CHECK_THROWS_AS(maximal_periodic_interval(m2(), {Rat(1, 2), Side::plus}, 2), Error);
    CHECK_THROWS_AS(maximal_periodic_interval(m2(), {Rat(1, 2), Side::plus}, 6), Error);
    CHECK_THROWS_AS(maximal_periodic_interval(m3(), {Rat(1, 3), Side::minus}, 1), Error);
}

TEST_CASE("correspondence report") {
    AttractorResult a = compute_attractor(m3(), 10);
    CorrespondenceReport rep = correspondence_report(m3(), a.X, 100);
    REQUIRE(rep.per_disc.size() == 2);
    CHECK(rep.per_disc[0].verdict == CorrVerdict::holds);
    CHECK(rep.per_disc[1].verdict == CorrVerdict::holds);
    CHECK(rep.all_hold());

    a = compute_attractor(m2(), 10);
    rep = correspondence_report(m2(), a.X, 100);
    REQUIRE(rep.per_disc.size() == 1);
    CHECK(rep.per_disc[0].verdict == CorrVerdict::holds);
}

TEST_CASE("ghost graph and the third condition") {
    AttractorResult a = compute_attractor(m2(), 10);
    A3Result r = ghost_graph_and_a3(m2(), a.X, 100);
    CHECK(r.g.edges.empty());
    CHECK(r.pass());

    a = compute_attractor(m3(), 10);
    r = ghost_graph_and_a3(m3(), a.X, 100);
    REQUIRE(r.g.edges.size() == 2);
    CHECK(r.g.edges[0].from == SignedPoint{Rat(1, 3), Side::minus});
    CHECK(r.g.edges[0].to == SignedPoint{Rat(2, 3), Side::plus});
    CHECK(r.g.edges[0].time == 1);
    CHECK(r.g.edges[1].from == SignedPoint{Rat(2, 3), Side::plus});
    CHECK(r.g.edges[1].to == SignedPoint{Rat(1, 3), Side::minus});
    CHECK(r.g.edges[1].time == 2);
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0] == SignedPoint{Rat(1, 3), Side::minus});
    CHECK(r.violations[1] == SignedPoint{Rat(2, 3), Side::plus});
    CHECK(!r.pass());
}

TEST_CASE("unstable number") {
    AttractorResult a = compute_attractor(m2(), 10);
    CHECK(unstable_number(m2(), a.X, 100) == 0);
    a = compute_attractor(m3(), 10);
    CHECK(unstable_number(m3(), a.X, 100) == 2);
}
