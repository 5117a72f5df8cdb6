#include "itm/map.hpp"

#include <unordered_map>

namespace itm {

std::string to_string(const SignedPoint& p) {
    return rat_str(p.value) + side_char(p.side);
}

std::vector<Violation> validate_itm(const ParamVector& p) {
    std::vector<Violation> out;
    if (p.r < 2) out.push_back({"r >= 2", 0});
    if ((int)p.beta.size() != p.r + 1) out.push_back({"beta has r+1 entries", 0});
    if ((int)p.gamma.size() != p.r) out.push_back({"gamma has r entries", 0});
    if (!out.empty()) return out;
    if (p.beta.front() != 0) out.push_back({"beta_0 = 0", 0});
    if (p.beta.back() != 1) out.push_back({"beta_r = 1", p.r});
    for (int i = 1; i <= p.r; ++i)
        if (!(p.beta[i - 1] < p.beta[i])) out.push_back({"beta strictly increasing", i});
    for (int i = 1; i <= p.r; ++i) {
        if (p.gamma[i - 1] < -p.beta[i - 1])
            out.push_back({"gamma_i >= -beta_{i-1}", i});
        if (p.gamma[i - 1] > 1 - p.beta[i])
            out.push_back({"gamma_i <= 1-beta_i", i});
    }
    return out;
}

void require_valid(const ParamVector& p) {
    auto v = validate_itm(p);
    if (!v.empty())
        throw Error("invalid-itm", v.front().constraint + " (index " + std::to_string(v.front().index) + ")");
}

int branch_index(const ParamVector& p, const SignedPoint& x) {
    if (x.side == Side::minus && x.value == 0)
        throw Error("sentinel-out-of-domain", "0^- has no branch");
    if (x.side == Side::plus && x.value == 1)
        throw Error("sentinel-out-of-domain", "1^+ has no branch");
    if (x.value < 0 || x.value > 1)
        throw Error("out-of-domain", to_string(x));
    // plus: beta[i-1] <= v < beta[i]; minus: beta[i-1] < v <= beta[i]
    int lo = 1, hi = p.r;
    while (lo < hi) {
        int mid = (lo + hi) / 2;
        bool left = (x.side == Side::plus) ? (x.value < p.beta[mid]) : (x.value <= p.beta[mid]);
        if (left) hi = mid; else lo = mid + 1;
    }
    return lo;
}

SignedPoint apply(const ParamVector& p, const SignedPoint& x) {
    int i = branch_index(p, x);
    return SignedPoint{x.value + p.gamma_of(i), x.side};
}

std::optional<int> discontinuity_index(const ParamVector& p, const Rat& v) {
    for (int i = 1; i <= p.r - 1; ++i)
        if (p.beta[i] == v) return i;
    return std::nullopt;
}

std::vector<SignedPoint> critical_set(const ParamVector& p) {
    std::vector<SignedPoint> out;
    for (int i = 1; i <= p.r - 1; ++i) {
        out.push_back({p.beta[i], Side::minus});
        out.push_back({p.beta[i], Side::plus});
    }
    return out;
}

std::optional<Landing> OrbitRecord::first_proper_landing() const {
    for (const auto& l : landings)
        if (l.time >= 1) return l;
    return std::nullopt;
}

OrbitRecord orbit_record(const ParamVector& p, const SignedPoint& x, long budget) {
    if (budget < 1) throw Error("bad-budget", "budget must be >= 1");
    OrbitRecord rec;
    rec.start = x;
    std::unordered_map<Rat, long, RatHash> seen;  // side is constant along the orbit
    SignedPoint cur = x;
    for (long t = 0;; ++t) {
        auto it = seen.find(cur.value);
        if (it != seen.end()) {
            rec.preperiod = it->second;
            rec.period = t - it->second;
            rec.points.push_back(cur);
            // drop landings at or past the cycle close
            while (!rec.landings.empty() && rec.landings.back().time >= t)
                rec.landings.pop_back();
            return rec;
        }
        if (t >= budget) return rec;  // period absent
        seen.emplace(cur.value, t);
        rec.points.push_back(cur);
        if (auto d = discontinuity_index(p, cur.value))
            rec.landings.push_back({t, *d, cur.side});
        cur = apply(p, cur);
        rec.branches.push_back(branch_index(p, rec.points.back()));
    }
}

EntryCounts entry_counts_and_translation(const ParamVector& p, const SignedPoint& x, long n) {
    if (n < 0) throw Error("bad-argument", "n must be >= 0");
    EntryCounts ec;
    ec.counts.assign(p.r, 0);
    ec.tr = 0;
    SignedPoint cur = x;
    for (long j = 0; j < n; ++j) {
        int i = branch_index(p, cur);
        ec.counts[i - 1] += 1;
        ec.tr += p.gamma_of(i);
        cur.value += p.gamma_of(i);
    }
    return ec;
}

Int denominator_lcm(const ParamVector& p) {
    Int d = 1;
    for (const auto& b : p.beta) d = lcm(d, rat_den(b));
    for (const auto& g : p.gamma) d = lcm(d, rat_den(g));
    return d;
}

}  // namespace itm
