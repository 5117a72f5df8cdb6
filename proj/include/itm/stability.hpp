#pragma once

#include "itm/critical.hpp"

namespace itm {

enum class Verdict { stable, unstable, undecided };

std::string to_string(Verdict v);

struct ComponentReport {
    ReturnMapData rm;
    ComponentClass cls;
    bool a1 = false;        // every chain hits at most one discontinuity
    bool a2 = false;        // outer branch points never hit one (non-trivial only)
    bool matching = false;  // N == 2 (non-trivial only)
};

struct StabilityReport {
    AttractorResult attractor;
    ComponentsReport comps;                  // valid when finite_type
    std::vector<ComponentReport> components; // one per component of X
    A3Result a3;
    long unstable_number = -1;
    bool a1 = false, a2 = false, a3_pass = false, matching = false;
    Verdict verdict = Verdict::undecided;
};

// Full analysis: attractor, per-component return maps, the four stability
// conditions, the ghost graph, and U(T). Return maps and chains get twice
// the attractor budget.
StabilityReport stability_report(const ParamVector& p, long budget);

struct MatchingIdentities {
    bool boundary_images = false;  // R(a^+) = x, R(a^-) = y for J = [x, y)
    bool second_returns = false;   // R^2(a^-) and R^2(a^+): equal values, opposite sides
    bool all() const { return boundary_images && second_returns; }
};

// Structural identities of a matching (N == 2) component, a = a_1.
MatchingIdentities matching_identities_check(const ParamVector& p, const ReturnMapData& d,
                                             long budget);

}  // namespace itm
