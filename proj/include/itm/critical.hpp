#pragma once

#include "itm/returnmap.hpp"

namespace itm {

enum class CritClass { C1, C2, undecided };

struct CriticalClassification {
    struct Entry {
        SignedPoint pt;
        int disc;
        CritClass cls;
        long witness_time = -1;  // C1: first proper landing time; C2: cycle close time
    };
    std::vector<Entry> entries;
};

// C1: lands on a discontinuity at some time >= 1 (time 0 never counts).
// C2: never lands but is eventually periodic. Rational maps never yield
// undecided within an adequate budget.
CriticalClassification critical_classification(const ParamVector& p, long budget);

struct CyclePartition {
    std::vector<std::vector<int>> cycles;  // each sorted; over discs with a signed part in X
};

CyclePartition cycles_partition(const ParamVector& p, const IntervalSet& X, long budget);

// Largest interval of points sharing b's periodic itinerary; Tr over one
// period is zero on it. Throws not-periodic unless b is periodic with the
// given minimal period.
Interval maximal_periodic_interval(const ParamVector& p, const SignedPoint& b, long period);

enum class CorrVerdict { holds, fails, not_applicable };

struct CorrespondenceReport {
    struct Entry {
        int disc;
        CorrVerdict verdict;
    };
    std::vector<Entry> per_disc;
    bool all_hold() const {
        for (const auto& e : per_disc)
            if (e.verdict == CorrVerdict::fails) return false;
        return true;
    }
    std::vector<int> failing() const {
        std::vector<int> out;
        for (const auto& e : per_disc)
            if (e.verdict == CorrVerdict::fails) out.push_back(e.disc);
        return out;
    }
};

CorrespondenceReport correspondence_report(const ParamVector& p, const IntervalSet& X, long budget);

struct GhostGraph {
    struct Edge {
        SignedPoint from, to;
        long time;  // landing time of `from` onto value(to)
    };
    std::vector<Edge> edges;
};

struct A3Result {
    GhostGraph g;
    std::vector<SignedPoint> violations;  // on a directed cycle, signed value outside X
    bool pass() const { return violations.empty(); }
};

A3Result ghost_graph_and_a3(const ParamVector& p, const IntervalSet& X, long budget);

long unstable_number(const ParamVector& p, const IntervalSet& X, long budget);

}  // namespace itm
