#pragma once

#include "itm/interval_set.hpp"

#include <set>
#include <vector>

namespace itm {

struct AttractorResult {
    std::vector<IntervalSet> chain;  // X_0, X_1, ...
    bool finite_type = false;
    long n_star = -1;      // first n with X_{n+1} = X_n (finite type only)
    IntervalSet X;         // finite type: the attractor; else last computed X_n
    long budget = 0;

    const IntervalSet& last() const { return chain.back(); }
};

AttractorResult compute_attractor(const ParamVector& p, long budget);

// Guaranteed-sufficient budget for rational maps: D+1 with D the lcm of all
// parameter denominators. Throws ceiling-exceeded when D > ceiling.
long stabilization_budget(const ParamVector& p, long ceiling = 2'000'000);

struct IntervalComponent {
    Rat lo, hi;  // [lo, hi)
    int index = 0;
};

struct SignedMembership {
    int disc;  // 1..r-1
    Side side;
    bool in_x;
};

struct ComponentsReport {
    std::vector<IntervalComponent> components;
    std::set<int> boundary_criticals;  // i with beta_i equal to some component endpoint
    std::vector<SignedMembership> signed_membership;
};

// Requires X to be the finite-type attractor (image(X) == X).
ComponentsReport components_and_boundary(const ParamVector& p, const IntervalSet& X);

}  // namespace itm
