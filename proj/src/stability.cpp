#include "itm/stability.hpp"

#include <map>

namespace itm {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::unstable: return "unstable";
        default: return "undecided";
    }
}

StabilityReport stability_report(const ParamVector& p, long budget) {
    StabilityReport rep;
    rep.attractor = compute_attractor(p, budget);
    if (!rep.attractor.finite_type) return rep;  // undecided

    const IntervalSet& X = rep.attractor.X;
    long inner = 2 * budget;
    rep.comps = components_and_boundary(p, X);
    rep.a1 = rep.a2 = rep.matching = true;
    for (const auto& J : rep.comps.components) {
        ComponentReport cr;
        cr.rm = compute_return_map(p, X, J, inner);
        cr.cls = classify_component(cr.rm);
        const ReturnMapData& d = cr.rm;
        cr.a1 = true;
        for (int j = 0; j <= d.N - 1; ++j)
            if (d.m(j, Side::plus) > 1) cr.a1 = false;
        for (int j = 1; j <= d.N; ++j)
            if (d.m(j, Side::minus) > 1) cr.a1 = false;
        // interior points of a branch may sweep over removable discontinuities;
        // no single point may meet two critical values before returning
        for (const Branch& b : d.branches) {
            std::map<Rat, int> meets;
            Rat off = 0;
            for (int s : b.itinerary) {
                for (int i = 1; i <= p.r - 1; ++i) {
                    Rat pre = p.beta[i] - off;
                    if (b.lo < pre && pre < b.hi) ++meets[pre];
                }
                off += p.gamma_of(s);
            }
            for (const auto& [pre, cnt] : meets)
                if (cnt > 1) cr.a1 = false;
        }
        if (cr.cls == ComponentClass::dynamically_non_trivial) {
            cr.a2 = d.m(0, Side::plus) == 0 && d.m(d.N, Side::minus) == 0;
            cr.matching = d.N == 2;
        } else {
            cr.a2 = true;
            cr.matching = true;
        }
        rep.a1 = rep.a1 && cr.a1;
        rep.a2 = rep.a2 && cr.a2;
        rep.matching = rep.matching && cr.matching;
        rep.components.push_back(std::move(cr));
    }
    rep.a3 = ghost_graph_and_a3(p, X, inner);
    rep.a3_pass = rep.a3.pass();
    rep.unstable_number = unstable_number(p, X, inner);
    bool stable = rep.a1 && rep.a2 && rep.a3_pass && rep.matching;
    rep.verdict = stable ? Verdict::stable : Verdict::unstable;
    return rep;
}

MatchingIdentities matching_identities_check(const ParamVector& p, const ReturnMapData& d,
                                             long budget) {
    if (d.N != 2) throw Error("not-matching", "component has N != 2");
    MatchingIdentities mi;
    SignedPoint ap{d.a[1], Side::plus}, am{d.a[1], Side::minus};
    SignedPoint rp = return_map_apply(p, d.J, ap, budget);
    SignedPoint rm = return_map_apply(p, d.J, am, budget);
    mi.boundary_images = rp.value == d.J.lo && rm.value == d.J.hi;
    SignedPoint rp2 = return_map_apply(p, d.J, rp, budget);
    SignedPoint rm2 = return_map_apply(p, d.J, rm, budget);
    mi.second_returns = rp2.value == rm2.value && rp2.side == opposite(rm2.side);
    return mi;
}

}  // namespace itm
