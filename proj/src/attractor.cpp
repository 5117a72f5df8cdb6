#include "itm/attractor.hpp"

namespace itm {

AttractorResult compute_attractor(const ParamVector& p, long budget) {
    require_valid(p);
    if (budget < 1) throw Error("bad-budget", "budget must be >= 1");
    AttractorResult res;
    res.budget = budget;
    res.chain.push_back(IntervalSet::unit());
    for (long n = 0; n < budget; ++n) {
        IntervalSet next = image_interval_set(p, res.chain.back());
        if (next == res.chain.back()) {
            res.finite_type = true;
            res.n_star = n;
            res.X = res.chain.back();
            return res;
        }
        res.chain.push_back(std::move(next));
    }
    res.X = res.chain.back();
    return res;
}

long stabilization_budget(const ParamVector& p, long ceiling) {
    require_valid(p);
    Int d = denominator_lcm(p);
    if (d > ceiling)
        throw Error("ceiling-exceeded", "denominator lcm " + d.str() +
                                            " exceeds cap " + std::to_string(ceiling));
    return (long)d + 1;
}

ComponentsReport components_and_boundary(const ParamVector& p, const IntervalSet& X) {
    if (!(image_interval_set(p, X) == X))
        throw Error("not-finite-type", "X is not exactly invariant");
    ComponentsReport rep;
    int idx = 0;
    for (const auto& iv : X.intervals())
        rep.components.push_back({iv.lo, iv.hi, idx++});
    for (int i = 1; i <= p.r - 1; ++i) {
        for (const auto& c : rep.components) {
            if (p.beta[i] == c.lo || p.beta[i] == c.hi) {
                rep.boundary_criticals.insert(i);
                break;
            }
        }
        rep.signed_membership.push_back({i, Side::minus, X.contains(SignedPoint{p.beta[i], Side::minus})});
        rep.signed_membership.push_back({i, Side::plus, X.contains(SignedPoint{p.beta[i], Side::plus})});
    }
    return rep;
}

}  // namespace itm
