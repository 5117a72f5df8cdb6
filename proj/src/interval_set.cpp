#include "itm/interval_set.hpp"

#include <algorithm>

namespace itm {

IntervalSet::IntervalSet(std::vector<Interval> raw) {
    std::erase_if(raw, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    std::sort(raw.begin(), raw.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (auto& iv : raw) {
        if (!ivs_.empty() && iv.lo <= ivs_.back().hi) {
            if (iv.hi > ivs_.back().hi) ivs_.back().hi = iv.hi;
        } else {
            ivs_.push_back(iv);
        }
    }
}

IntervalSet IntervalSet::unit() { return single(Rat(0), Rat(1)); }

IntervalSet IntervalSet::single(const Rat& lo, const Rat& hi) {
    return IntervalSet(std::vector<Interval>{{lo, hi}});
}

Rat IntervalSet::measure() const {
    Rat m = 0;
    for (const auto& iv : ivs_) m += iv.hi - iv.lo;
    return m;
}

bool IntervalSet::contains(const Rat& v) const {
    for (const auto& iv : ivs_) {
        if (v < iv.lo) return false;
        if (v < iv.hi) return true;
    }
    return false;
}

bool IntervalSet::contains(const SignedPoint& x) const {
    for (const auto& iv : ivs_) {
        if (x.side == Side::plus) {
            if (iv.lo <= x.value && x.value < iv.hi) return true;
        } else {
            if (iv.lo < x.value && x.value <= iv.hi) return true;
        }
        if (x.value < iv.lo) return false;
    }
    return false;
}

IntervalSet IntervalSet::unite(const IntervalSet& o) const {
    std::vector<Interval> all = ivs_;
    all.insert(all.end(), o.ivs_.begin(), o.ivs_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
    std::vector<Interval> out;
    size_t i = 0, j = 0;
    while (i < ivs_.size() && j < o.ivs_.size()) {
        Rat lo = std::max(ivs_[i].lo, o.ivs_[j].lo);
        Rat hi = std::min(ivs_[i].hi, o.ivs_[j].hi);
        if (lo < hi) out.push_back({lo, hi});
        if (ivs_[i].hi < o.ivs_[j].hi) ++i; else ++j;
    }
    return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::difference(const IntervalSet& o) const {
    std::vector<Interval> out;
    for (const auto& iv : ivs_) {
        Rat cur = iv.lo;
        for (const auto& cut : o.ivs_) {
            if (cut.hi <= cur) continue;
            if (cut.lo >= iv.hi) break;
            if (cut.lo > cur) out.push_back({cur, std::min(cut.lo, iv.hi)});
            cur = std::max(cur, cut.hi);
            if (cur >= iv.hi) break;
        }
        if (cur < iv.hi) out.push_back({cur, iv.hi});
    }
    return IntervalSet(std::move(out));
}

bool IntervalSet::subset_of(const IntervalSet& o) const {
    return difference(o).empty();
}

IntervalSet image_interval_set(const ParamVector& p, const IntervalSet& s) {
    std::vector<Interval> out;
    for (const auto& iv : s.intervals()) {
        Rat cur = iv.lo;
        // walk the branches overlapping [lo, hi)
        int i = branch_index(p, SignedPoint{iv.lo, Side::plus});
        while (cur < iv.hi) {
            Rat cut = std::min(iv.hi, p.beta[i]);
            out.push_back({cur + p.gamma_of(i), cut + p.gamma_of(i)});
            cur = cut;
            ++i;
        }
    }
    return IntervalSet(std::move(out));
}

}  // namespace itm
