#pragma once

#include "itm/map.hpp"

#include <vector>

namespace itm {

struct Interval {
    Rat lo, hi;  // [lo, hi)
    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
    Rat length() const { return hi - lo; }
};

// Normalized finite union of half-open intervals [a,b) with a < b and
// strict gaps between consecutive intervals (touching pieces are merged).
class IntervalSet {
public:
    IntervalSet() = default;
    IntervalSet(std::vector<Interval> raw);  // normalizes
    static IntervalSet unit();               // [0,1)
    static IntervalSet single(const Rat& lo, const Rat& hi);

    const std::vector<Interval>& intervals() const { return ivs_; }
    bool empty() const { return ivs_.empty(); }
    size_t size() const { return ivs_.size(); }

    Rat measure() const;
    bool contains(const Rat& v) const;
    // Signed membership: v^+ in [a,b) iff a <= v < b; v^- iff a < v <= b.
    bool contains(const SignedPoint& x) const;

    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet difference(const IntervalSet& o) const;
    bool subset_of(const IntervalSet& o) const;

    bool operator==(const IntervalSet& o) const { return ivs_ == o.ivs_; }

private:
    std::vector<Interval> ivs_;
};

// Exact image T(S): each interval split at interior discontinuities and
// translated by its branch.
IntervalSet image_interval_set(const ParamVector& p, const IntervalSet& s);

}  // namespace itm
