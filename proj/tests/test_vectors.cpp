#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_util.hpp"
#include "itm/vectors.hpp"

using namespace itm;
using namespace itm::testing;

namespace {

CoefVector cv(std::vector<long> e, std::vector<long> f) {
    CoefVector v;
    for (long x : e) v.e.push_back(x);
    for (long x : f) v.f.push_back(x);
    return v;
}

ReturnMapData component_map(const ParamVector& p, int which = 0) {
    long budget = 2 * stabilization_budget(p);
    AttractorResult a = compute_attractor(p, budget);
    REQUIRE(a.finite_type);
    ComponentsReport rep = components_and_boundary(p, a.X);
    return compute_return_map(p, a.X, rep.components[which], budget);
}

// r=4 fixture whose full-interval component has N=3 and non-landing
// boundary points
ParamVector v3() {
    return {4, {Rat(0), Rat(1, 6), Rat(1, 3), Rat(5, 6), Rat(1)},
            {Rat(1, 2), Rat(1, 2), Rat(-1, 3), Rat(0)}};
}

// r=4 fixture with N=4
ParamVector v4() {
    return {4, {Rat(0), Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)},
            {Rat(1, 4), Rat(1, 2), Rat(-1, 2), Rat(-1, 4)}};
}

}  // namespace

TEST_CASE("coefficient vector algebra and products") {
    ParamVector p = m2();
    CoefVector a = cv({1, 0}, {1}), b = cv({0, 1}, {-1});
    CHECK(product(a, p) == Rat(1, 4) + Rat(1, 2));
    CHECK(product(b, p) == Rat(-1, 2) - Rat(1, 2));
    CHECK((a + b) == cv({1, 1}, {0}));
    CHECK((a - b) == cv({1, -1}, {2}));
    CHECK((-a) == cv({-1, 0}, {-1}));
    CHECK(!a.is_zero());
    CHECK((a - a).is_zero());
}

TEST_CASE("the r=2 fixture bundle matches the hand-computed vectors") {
    ParamVector p = m2();
    ReturnMapData d = component_map(p);
    ComponentVectorBundle b = build_bundle(p, d);
    REQUIRE(b.N == 2);

    REQUIRE(b.L[1].has_value());
    CHECK(*b.L[1] == cv({0, 0}, {-1}));
    CHECK(!b.L[0].has_value());
    CHECK(!b.L[2].has_value());

    CHECK(b.plus[1].landing_form);
    CHECK(b.plus[1].ret == cv({0, 1}, {1}));
    CHECK(b.minus[1].landing_form);
    CHECK(b.minus[1].ret == cv({1, 0}, {1}));
    CHECK(!b.plus[0].landing_form);
    CHECK(b.plus[0].ret == cv({1, 0}, {0}));
    CHECK(!b.minus[2].landing_form);
    CHECK(b.minus[2].ret == cv({0, 1}, {0}));
    for (int j = 0; j <= 1; ++j) CHECK(b.plus[j].connections.empty());

    CHECK(product(*b.L[1], p) + Rat(1, 2) == 0);
    CHECK(product(b.plus[1].ret, p) == Rat(0));   // R(1/2+) = 0
    CHECK(product(b.minus[1].ret, p) == Rat(3, 4));  // R(1/2-) = 3/4
    CHECK(product(b.plus[0].ret, p) == Rat(1, 4));   // R(0+) - 0

    CHECK(verify_identities(p, d, b).pass());
}

TEST_CASE("verify_identities flags a corrupted entry") {
    ParamVector p = m2();
    ReturnMapData d = component_map(p);
    ComponentVectorBundle b = build_bundle(p, d);
    b.plus[1].ret.e[0] += 1;
    IdentityCheck chk = verify_identities(p, d, b);
    REQUIRE(chk.failures.size() == 1);
    CHECK(chk.failures[0] == "R+[1]");
}

TEST_CASE("the r=3 fixture bundle carries the boundary landing forms") {
    ParamVector p = m3();
    ReturnMapData d = component_map(p);
    ComponentVectorBundle b = build_bundle(p, d);
    REQUIRE(b.N == 1);
    REQUIRE(b.L[0].has_value());
    CHECK(*b.L[0] == cv({0, 0, 0}, {-1, 0}));
    REQUIRE(b.L[1].has_value());
    CHECK(*b.L[1] == cv({0, 0, 0}, {0, -1}));
    CHECK(b.plus[0].landing_form);
    CHECK(b.plus[0].ret == cv({0, 1, 0}, {1, 0}));
    CHECK(b.minus[1].landing_form);
    CHECK(b.minus[1].ret == cv({0, 1, 0}, {0, 1}));
    CHECK(verify_identities(p, d, b).pass());
}

TEST_CASE("identities hold on random maps") {
    std::mt19937 rng(53);
    for (int it = 0; it < 120; ++it) {
        ParamVector p = random_map(rng, 2 + it % 3, 12);
        long budget = 2 * stabilization_budget(p);
        AttractorResult a = compute_attractor(p, budget);
        REQUIRE(a.finite_type);
        ComponentsReport rep = components_and_boundary(p, a.X);
        for (const auto& J : rep.components) {
            ReturnMapData d = compute_return_map(p, a.X, J, budget);
            ComponentVectorBundle b = build_bundle(p, d);
            CHECK(verify_identities(p, d, b).pass());
        }
    }
}

TEST_CASE("exact rank") {
    CHECK(exact_rank({}) == 0);
    CHECK(exact_rank({cv({0, 0}, {0})}) == 0);
    CHECK(exact_rank({cv({1, 2}, {3}), cv({2, 4}, {6})}) == 1);
    CHECK(exact_rank({cv({1, 0}, {0}), cv({0, 1}, {0}), cv({1, 1}, {1})}) == 3);
    CHECK(exact_rank({cv({1, 1}, {0}), cv({1, 0}, {1}), cv({0, 1}, {-1})}) == 2);
}

TEST_CASE("independence witnesses on the N=3 fixture") {
    ParamVector p = v3();
    ReturnMapData d = component_map(p);
    REQUIRE(d.N == 3);
    CHECK(!d.a0_lands);
    CHECK(!d.aN_lands);
    IndependenceWitnesses iw = independence_witnesses(p, d);
    // the substituted boundary row is dropped, one vector remains
    REQUIRE(iw.vectors.size() == 1);
    CHECK(iw.vectors[0] == cv({0, 1, 0, -1}, {0, 1, -1}));
    CHECK(product(iw.vectors[0], p) == 0);
    CHECK(iw.rank == 1);
}

TEST_CASE("independence witnesses on the N=4 fixture") {
    ParamVector p = v4();
    ReturnMapData d = component_map(p);
    REQUIRE(d.N == 4);
    IndependenceWitnesses iw = independence_witnesses(p, d);
    CHECK((int)iw.vectors.size() >= d.N - 2);
    CHECK(iw.rank >= d.N - 2);
    for (const auto& v : iw.vectors) CHECK(product(v, p) == 0);
}

TEST_CASE("independence witnesses require N >= 3") {
    ParamVector p = m2();
    ReturnMapData d = component_map(p);
    CHECK_THROWS_AS(independence_witnesses(p, d), Error);
}

TEST_CASE("independence witnesses across random maps") {
    std::mt19937 rng(59);
    int seen = 0;
    for (int it = 0; it < 400 && seen < 25; ++it) {
        ParamVector p = random_map(rng, 3 + it % 2, 12);
        long budget = 2 * stabilization_budget(p);
        AttractorResult a = compute_attractor(p, budget);
        REQUIRE(a.finite_type);
        ComponentsReport rep = components_and_boundary(p, a.X);
        for (const auto& J : rep.components) {
            ReturnMapData d = compute_return_map(p, a.X, J, budget);
            if (d.N < 3) continue;
            ++seen;
            IndependenceWitnesses iw = independence_witnesses(p, d);
            CHECK(iw.rank >= d.N - 2);
            for (const auto& v : iw.vectors) CHECK(product(v, p) == 0);
        }
    }
    CHECK(seen > 0);
}

TEST_CASE("measure-zero witnesses") {
    ParamVector p = m3();
    StabilityReport rep = stability_report(p, stabilization_budget(p));
    auto w = measure_zero_witness(p, rep, false);
    REQUIRE(w.has_value());
    CHECK(*w == cv({1, 0, 0}, {1, -1}));  // the 1/3^- -> 2/3 connection
    CHECK(product(*w, p) == 0);

    p = m2();
    rep = stability_report(p, stabilization_budget(p));
    CHECK(!measure_zero_witness(p, rep, false).has_value());
    w = measure_zero_witness(p, rep, true);
    REQUIRE(w.has_value());
    CHECK(*w == cv({2, 1}, {0}));  // period-3 orbit of 1/2: two visits left, one right
    CHECK(product(*w, p) == 0);
}

TEST_CASE("every rational finite-type map yields a periodic witness") {
    std::mt19937 rng(61);
    for (int it = 0; it < 60; ++it) {
        ParamVector p = random_map(rng, 2 + it % 3, 12);
        StabilityReport rep = stability_report(p, stabilization_budget(p));
        auto w = measure_zero_witness(p, rep, true);
        REQUIRE(w.has_value());
        CHECK(product(*w, p) == 0);
    }
}

TEST_CASE("linear dependence coefficient check") {
    ParamVector p = m2();
    ReturnMapData d = component_map(p);
    ComponentVectorBundle b = build_bundle(p, d);

    DependenceCoefficients c = zero_coefficients(b);
    CHECK(lin_dep_coefficient_check(b, c).pass());  // zero combination

    // a genuine dependence: 3 L1 - R0+ + 2 R1+ + R1- - 2 R2- = 0
    c.L[1] = 3;
    c.ret_plus[0] = -1;
    c.ret_plus[1] = 2;
    c.ret_minus[1] = 1;
    c.ret_minus[2] = -2;
    LinDepVerdict v = lin_dep_coefficient_check(b, c);
    CHECK(v.is_dependence);
    CHECK(v.pass());

    c.L[1] = 1;  // breaks the sum
    v = lin_dep_coefficient_check(b, c);
    CHECK(!v.is_dependence);
    CHECK(!v.pass());

    // corrupted bookkeeping shows up as a chain violation: rescaling a
    // vector and its coefficient keeps the sum zero but breaks the chain
    c.L[1] = 3;
    ComponentVectorBundle bad = b;
    bad.minus[1].ret = bad.minus[1].ret + bad.minus[1].ret;
    c.ret_minus[1] = Rat(1, 2);
    v = lin_dep_coefficient_check(bad, c);
    CHECK(v.is_dependence);
    CHECK(!v.violations.empty());
    CHECK(!v.pass());
}

TEST_CASE("random dependences satisfy the equality chain") {
    // exact nullspace elements of engine-built bundles must satisfy the
    // chain (a correctness property of the chain bookkeeping)
    std::mt19937 rng(67);
    int tested = 0;
    for (int it = 0; it < 80 && tested < 15; ++it) {
        ParamVector p = random_map(rng, 2 + it % 3, 10);
        long budget = 2 * stabilization_budget(p);
        AttractorResult a = compute_attractor(p, budget);
        ComponentsReport rep = components_and_boundary(p, a.X);
        for (const auto& J : rep.components) {
            ReturnMapData d = compute_return_map(p, a.X, J, budget);
            ComponentVectorBundle b = build_bundle(p, d);
            // collect all vectors with their coefficient slots
            struct Slot { Rat* coef; const CoefVector* vec; };
            DependenceCoefficients c = zero_coefficients(b);
            std::vector<Slot> slots;
            for (int j = 0; j <= b.N; ++j)
                if (b.L[j]) slots.push_back({&c.L[j], &*b.L[j]});
            for (int j = 0; j <= b.N - 1; ++j) {
                for (size_t k = 0; k < b.plus[j].connections.size(); ++k)
                    slots.push_back({&c.conn_plus[j][k], &b.plus[j].connections[k]});
                slots.push_back({&c.ret_plus[j], &b.plus[j].ret});
            }
            for (int j = 1; j <= b.N; ++j) {
                for (size_t k = 0; k < b.minus[j].connections.size(); ++k)
                    slots.push_back({&c.conn_minus[j][k], &b.minus[j].connections[k]});
                slots.push_back({&c.ret_minus[j], &b.minus[j].ret});
            }
            // rational row reduction of the transposed system to find one
            // nullspace element
            size_t n = slots.size(), cols = 2 * p.r - 1;
            std::vector<std::vector<Rat>> m(cols, std::vector<Rat>(n, Rat(0)));
            for (size_t i = 0; i < n; ++i) {
                for (int s = 0; s < p.r; ++s) m[s][i] = Rat(slots[i].vec->e[s]);
                for (int s = 0; s + 1 < p.r; ++s) m[p.r + s][i] = Rat(slots[i].vec->f[s]);
            }
            std::vector<int> pivot_of_col(n, -1);
            size_t row = 0;
            for (size_t col = 0; col < n && row < cols; ++col) {
                size_t pr = row;
                while (pr < cols && m[pr][col] == 0) ++pr;
                if (pr == cols) continue;
                std::swap(m[row], m[pr]);
                Rat pv = m[row][col];
                for (auto& x : m[row]) x /= pv;
                for (size_t i = 0; i < cols; ++i) {
                    if (i == row || m[i][col] == 0) continue;
                    Rat f = m[i][col];
                    for (size_t k2 = 0; k2 < n; ++k2) m[i][k2] -= f * m[row][k2];
                }
                pivot_of_col[col] = (int)row;
                ++row;
            }
            // pick the first free column, back-substitute a kernel vector
            int free_col = -1;
            for (size_t col = 0; col < n; ++col)
                if (pivot_of_col[col] < 0) { free_col = (int)col; break; }
            if (free_col < 0) continue;  // full column rank, only trivial dependence
            std::vector<Rat> sol(n, Rat(0));
            sol[free_col] = 1;
            for (size_t col = 0; col < n; ++col)
                if (pivot_of_col[col] >= 0) sol[col] = -m[pivot_of_col[col]][free_col];
            for (size_t i = 0; i < n; ++i) *slots[i].coef = sol[i];
            LinDepVerdict v = lin_dep_coefficient_check(b, c);
            CHECK(v.is_dependence);
            CHECK(v.pass());
            ++tested;
        }
    }
    CHECK(tested > 0);
}
