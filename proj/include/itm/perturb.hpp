#pragma once

#include "itm/stability.hpp"

#include <functional>
#include <string>

namespace itm {

// Best rational approximation to x with denominator <= max_denominator
// (nearest value; ties resolved towards the smaller denominator).
Rat best_rational_approx(const Rat& x, const Int& max_denominator);

// Nearest parameter vector with all denominators <= max_denominator; gammas
// are clamped back into the polytope after rounding. Throws infeasible when
// the rounded betas collide.
ParamVector rationalize(const ParamVector& p, const Int& max_denominator);

enum class PerturbStatus { success, infeasible, verification_failed };

std::string to_string(PerturbStatus s);

// One exact linear condition on the parameter deltas:
//   sum_s e_s dgamma_s + sum_i f_i dbeta_i = rhs.
struct DeltaConstraint {
    std::vector<Rat> e;  // size r
    std::vector<Rat> f;  // size r-1 (interior betas)
    Rat rhs;
    std::string label;
};

// A bundle of delta conditions plus the dynamical facts they are meant to
// realize. Claims are re-checked on the perturbed map: the orbit of
// (beta[disc], side) must reach exactly beta[target] + offset at `time`.
struct DeltaRequest {
    Rat eps;  // bound on the magnitude of every realized delta
    std::vector<DeltaConstraint> constraints;
    struct Claim {
        int disc;
        Side side;
        long time;
        int target;
        Rat offset;
    };
    std::vector<Claim> claims;
};

struct PerturbationOutcome {
    ParamVector result;
    std::vector<Rat> dgamma;  // size r
    std::vector<Rat> dbeta;   // size r-1
    PerturbStatus status = PerturbStatus::infeasible;
    std::string detail;
    long unstable_before = -1;
    long unstable_after = -1;
    bool correspondence_after = false;
    Verdict verdict_after = Verdict::undecided;
    int rounds = 0;
    Rat distance;  // |result - input|_inf over all parameters

    bool ok() const { return status == PerturbStatus::success; }
};

// Solves the request's linear system exactly (free variables zero), applies
// the solution, and verifies validity, the delta bound, and every claim on
// the perturbed map.
PerturbationOutcome realize_deltas(const ParamVector& p, const DeltaRequest& req);

struct PerturbOptions {
    long budget_cap = 2'000'000;
    int max_retries = 8;      // geometric eps/2^k schedule per stage
    int max_iterations = 64;  // iteration cap inside a stage
    long time_budget_ms = 0;  // wall-clock cap per stage call; 0 = unlimited
};

// Shifts every periodic side violating the correspondence property until the
// property holds everywhere; the unstable number never increases.
PerturbationOutcome perturb_to_correspondence(const ParamVector& p, const Rat& eps,
                                              const PerturbOptions& opt = {});

// One verified strict reduction of the unstable number. Throws no-offender
// when U(p) = 0.
PerturbationOutcome reduce_unstable_number(const ParamVector& p, const Rat& eps,
                                           const PerturbOptions& opt = {});

// Offsets every critical connection with both endpoints outside X so that the
// ghost graph loses its cycles through out-of-X nodes.
PerturbationOutcome clear_outside_connections(const ParamVector& p, const Rat& eps,
                                              const PerturbOptions& opt = {});

struct PipelineTrail {
    struct Stage {
        std::string name;
        PerturbStatus status = PerturbStatus::infeasible;
        long u_before = -1;
        long u_after = -1;
        Rat distance;
        std::string detail;
    };
    std::vector<Stage> stages;
};

// Full stabilization pipeline: rationalize, then alternate correspondence /
// unstable-number / outside-connection stages until a fresh stability report
// says stable. Never reports success without that final report.
PerturbationOutcome perturb_to_stable(const ParamVector& p, const Rat& eps, int max_rounds,
                                      const PerturbOptions& opt = {},
                                      PipelineTrail* trail = nullptr);

}  // namespace itm
