#include "itm/critical.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace itm {

CriticalClassification critical_classification(const ParamVector& p, long budget) {
    require_valid(p);
    CriticalClassification cc;
    for (int i = 1; i <= p.r - 1; ++i) {
        for (Side s : {Side::minus, Side::plus}) {
            SignedPoint pt{p.beta[i], s};
            OrbitRecord rec = orbit_record(p, pt, budget);
            CriticalClassification::Entry e{pt, i, CritClass::undecided, -1};
            if (auto l = rec.first_proper_landing()) {
                e.cls = CritClass::C1;
                e.witness_time = l->time;
            } else if (rec.period) {
                e.cls = CritClass::C2;
                e.witness_time = rec.preperiod + *rec.period;
            }
            cc.entries.push_back(std::move(e));
        }
    }
    return cc;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
    void unite(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

CyclePartition cycles_partition(const ParamVector& p, const IntervalSet& X, long budget) {
    UnionFind uf(p.r);
    std::set<int> members;
    for (int i = 1; i <= p.r - 1; ++i) {
        for (Side s : {Side::minus, Side::plus}) {
            SignedPoint pt{p.beta[i], s};
            if (!X.contains(pt)) continue;
            members.insert(i);
            OrbitRecord rec = orbit_record(p, pt, budget);
            if (!rec.period) throw Error("budget-exceeded", "orbit of " + to_string(pt));
            for (const auto& l : rec.landings) {
                members.insert(l.disc);
                uf.unite(i, l.disc);
            }
        }
    }
    std::map<int, std::vector<int>> classes;
    for (int i : members) classes[uf.find(i)].push_back(i);
    CyclePartition cp;
    for (auto& [root, cls] : classes) {
        std::sort(cls.begin(), cls.end());
        cp.cycles.push_back(std::move(cls));
    }
    return cp;
}

Interval maximal_periodic_interval(const ParamVector& p, const SignedPoint& b, long period) {
    if (period < 1) throw Error("not-periodic", "period must be >= 1");
    Rat lo(0), hi(1);
    Rat offset(0);
    SignedPoint cur = b;
    for (long t = 0; t < period; ++t) {
        if (t > 0 && cur == b) throw Error("not-periodic", "period is not minimal");
        int i = branch_index(p, cur);
        // widen to the full continuity interval around branch i: removable
        // cuts (equal gamma on both sides) do not constrain the itinerary
        int a = i, b = i;
        while (a > 1 && p.gamma[a - 2] == p.gamma[a - 1]) --a;
        while (b < p.r && p.gamma[b - 1] == p.gamma[b]) ++b;
        lo = std::max(lo, Rat(p.beta[a - 1] - offset));
        hi = std::min(hi, Rat(p.beta[b] - offset));
        offset += p.gamma_of(i);
        cur = apply(p, cur);
    }
    if (!(cur == b)) throw Error("not-periodic", to_string(b) + " has no period " + std::to_string(period));
    if (!(lo < hi)) throw Error("internal", "empty periodic interval");
    return {lo, hi};
}

namespace {

bool interval_contains(const Interval& iv, const SignedPoint& x) {
    if (x.side == Side::plus) return iv.lo <= x.value && x.value < iv.hi;
    return iv.lo < x.value && x.value <= iv.hi;
}

}  // namespace

CorrespondenceReport correspondence_report(const ParamVector& p, const IntervalSet& X, long budget) {
    CorrespondenceReport rep;
    for (int i = 1; i <= p.r - 1; ++i) {
        CorrVerdict verdict = CorrVerdict::not_applicable;
        bool any_applicable = false, all_ok = true;
        for (Side s : {Side::plus, Side::minus}) {
            SignedPoint pt{p.beta[i], s};
            if (!X.contains(pt)) continue;
            OrbitRecord rec = orbit_record(p, pt, budget);
            if (!rec.period || !rec.periodic_from_start()) continue;
            any_applicable = true;
            Interval P = maximal_periodic_interval(p, pt, *rec.period);
            SignedPoint opp{p.beta[i], opposite(s)};
            OrbitRecord orec = orbit_record(p, opp, budget);
            bool landed = false;
            for (const auto& q : orec.points)
                if (interval_contains(P, q)) { landed = true; break; }
            if (!landed) all_ok = false;
        }
        if (any_applicable) verdict = all_ok ? CorrVerdict::holds : CorrVerdict::fails;
        rep.per_disc.push_back({i, verdict});
    }
    return rep;
}

A3Result ghost_graph_and_a3(const ParamVector& p, const IntervalSet& X, long budget) {
    A3Result res;
    std::vector<SignedPoint> nodes = critical_set(p);
    auto node_id = [&](const SignedPoint& q) -> int {
        for (size_t k = 0; k < nodes.size(); ++k)
            if (nodes[k] == q) return (int)k;
        return -1;
    };
    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& u : nodes) {
        OrbitRecord rec = orbit_record(p, u, budget);
        if (!rec.period) throw Error("budget-exceeded", "orbit of " + to_string(u));
        std::set<int> targets;
        for (const auto& l : rec.landings) {
            if (l.time < 1) continue;
            if (!targets.insert(l.disc).second) continue;
            SignedPoint w{p.beta[l.disc], opposite(u.side)};
            res.g.edges.push_back({u, w, l.time});
            adj[node_id(u)].push_back(node_id(w));
        }
    }
    // a node is on a directed cycle iff it reaches itself through >= 1 edge
    for (size_t k = 0; k < nodes.size(); ++k) {
        std::vector<bool> seen(nodes.size(), false);
        std::vector<int> stack(adj[k]);
        bool cyc = false;
        while (!stack.empty() && !cyc) {
            int v = stack.back();
            stack.pop_back();
            if (v == (int)k) { cyc = true; break; }
            if (seen[v]) continue;
            seen[v] = true;
            for (int w : adj[v]) stack.push_back(w);
        }
        if (cyc && !X.contains(nodes[k])) res.violations.push_back(nodes[k]);
    }
    return res;
}

long unstable_number(const ParamVector& p, const IntervalSet& X, long budget) {
    // Cycles are formed by periodic discontinuities that lie in X as points;
    // the orbit of the point beta_i is its right-continuous (plus) orbit. Two
    // discontinuities are in the same cycle when one lies on the orbit of the
    // other, which for periodic orbits is symmetric.
    UnionFind uf(p.r);
    std::set<int> members;
    for (int i = 1; i <= p.r - 1; ++i) {
        SignedPoint pt{p.beta[i], Side::plus};
        if (!X.contains(pt)) continue;
        OrbitRecord rec = orbit_record(p, pt, budget);
        if (!rec.period) throw Error("budget-exceeded", "orbit of " + to_string(pt));
        if (!rec.periodic_from_start()) continue;
        members.insert(i);
        for (const auto& l : rec.landings) {
            members.insert(l.disc);
            uf.unite(i, l.disc);
        }
    }
    std::map<int, long> class_size;
    for (int i : members) ++class_size[uf.find(i)];
    long u = 0;
    for (const auto& [root, sz] : class_size) u += sz - 1;
    ComponentsReport rep = components_and_boundary(p, X);
    u += (long)rep.boundary_criticals.size();
    return u;
}

}  // namespace itm
