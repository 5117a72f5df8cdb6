#pragma once

#include "itm/attractor.hpp"

namespace itm {

struct Branch {
    Rat lo, hi;             // domain [a_{j-1}, a_j)
    long return_time = 0;   // r_j
    Rat translation;        // Tr(J_j, r_j)
    std::vector<int> itinerary;  // branch of T at each step, length r_j
};

// Signed orbit of a branch point up to its return to J, with every
// discontinuity value hit strictly before the return.
struct Chain {
    SignedPoint start;
    long return_time = 0;
    std::vector<int> itinerary;
    struct Hit {
        long time;
        int disc;
    };
    std::vector<Hit> hits;  // times < return_time, in order; may start at time 0
};

struct ReturnMapData {
    IntervalComponent J;
    int N = 0;
    std::vector<Rat> a;            // a_0 = x < a_1 < ... < a_N = y
    std::vector<Branch> branches;  // branches[j-1] is J_j
    std::vector<int> sigma;        // sigma[j] for j in 1..N; sigma[0] unused
    std::vector<int> tau;          // inverse of sigma
    std::vector<long> landing_time;  // landing_time[j] = l_j for 1 <= j <= N-1
    std::vector<Chain> plus_chains;  // index j = 0..N-1 (a_j^+)
    std::vector<Chain> minus_chains; // index j = 1..N   (a_j^-)
    bool a0_lands = false, aN_lands = false;

    Rat length() const { return J.hi - J.lo; }
    const Chain& chain(int j, Side s) const {
        return s == Side::plus ? plus_chains[j] : minus_chains[j];
    }
    // Discontinuity hit count of a_j^s before return (m_j^side).
    int m(int j, Side s) const { return (int)chain(j, s).hits.size(); }
    // Image of branch j (1-based) as an interval.
    Interval image(int j) const {
        const Branch& b = branches[j - 1];
        return {b.lo + b.translation, b.hi + b.translation};
    }
};

ReturnMapData compute_return_map(const ParamVector& p, const IntervalSet& X,
                                 const IntervalComponent& J, long budget);

enum class ComponentClass { dynamically_trivial, dynamically_non_trivial };
ComponentClass classify_component(const ReturnMapData& d);

struct RotationClass {
    enum Kind { identity, rotation, not_a_rotation } kind;
    Rat rho;  // set when kind == rotation
};
RotationClass rotation_classification(const ReturnMapData& d);

// R_J on a signed point of J, by direct iteration.
SignedPoint return_map_apply(const ParamVector& p, const IntervalComponent& J,
                             const SignedPoint& x, long budget);

}  // namespace itm
