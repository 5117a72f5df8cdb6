#pragma once

#include "itm/stability.hpp"

namespace itm {

// Element of W(r) = Z^r + Z^{r-1}: e-part weights the gammas, f-part the
// interior betas.
struct CoefVector {
    std::vector<Int> e, f;

    CoefVector() = default;
    explicit CoefVector(int r) : e(r, 0), f(r - 1, 0) {}
    bool operator==(const CoefVector& o) const { return e == o.e && f == o.f; }
    bool is_zero() const;
};

CoefVector operator+(const CoefVector& a, const CoefVector& b);
CoefVector operator-(const CoefVector& a, const CoefVector& b);
CoefVector operator-(const CoefVector& a);

// <v, (gamma beta)> = sum e_s gamma_s + sum f_s beta_s
Rat product(const CoefVector& v, const ParamVector& p);

std::string to_string(const CoefVector& v);

// Vectors attached to one side of a branch point: the connection vectors
// C(j,k) between consecutive discontinuity hits of its chain, and the return
// vector (landing form when the chain hits a discontinuity, bare form for a
// non-landing boundary point).
struct SideVectors {
    std::vector<CoefVector> connections;
    CoefVector ret;
    bool landing_form = true;
};

struct ComponentVectorBundle {
    int r = 0, N = 0;
    std::vector<Rat> a;
    std::vector<std::optional<CoefVector>> L;  // 0..N; set iff a_j lands
    std::vector<SideVectors> plus;             // j = 0..N-1
    std::vector<SideVectors> minus;            // j = 1..N (index 0 unused)
};

ComponentVectorBundle build_bundle(const ParamVector& p, const ReturnMapData& d);

struct IdentityCheck {
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
};

// Exact re-check of every defining product identity of the bundle on p.
IdentityCheck verify_identities(const ParamVector& p, const ReturnMapData& d,
                                const ComponentVectorBundle& b);

// Rank of the span over the rationals (fraction-free elimination).
int exact_rank(const std::vector<CoefVector>& rows);

struct IndependenceWitnesses {
    std::vector<CoefVector> vectors;
    int rank = 0;
};

// The difference vectors of the return-map equalities (with boundary
// substitutions and the drop rule); requires N >= 3; every returned vector
// has product 0 with p and the rank is at least N-2.
IndependenceWitnesses independence_witnesses(const ParamVector& p, const ReturnMapData& d);

// A single integer vector orthogonal to (gamma beta): a critical connection
// if one exists, else a non-matching component's witness, else (when
// want_periodic) the entry-count vector of a periodic orbit.
std::optional<CoefVector> measure_zero_witness(const ParamVector& p,
                                               const StabilityReport& rep,
                                               bool want_periodic);

struct DependenceCoefficients {
    std::vector<Rat> L;                          // 0..N
    std::vector<Rat> ret_plus;                   // 0..N-1
    std::vector<Rat> ret_minus;                  // 0..N (0 unused)
    std::vector<std::vector<Rat>> conn_plus;     // per j, k = 1..m-1
    std::vector<std::vector<Rat>> conn_minus;
};

DependenceCoefficients zero_coefficients(const ComponentVectorBundle& b);

struct LinDepVerdict {
    bool is_dependence = false;  // weighted sum is the zero vector
    std::vector<std::string> violations;
    bool pass() const { return is_dependence && violations.empty(); }
};

// Checks the equality chain that any genuine dependence of the bundle must
// satisfy; reports sum-not-zero when the combination is not a dependence.
LinDepVerdict lin_dep_coefficient_check(const ComponentVectorBundle& b,
                                        const DependenceCoefficients& c);

}  // namespace itm
