#include "itm/returnmap.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace itm {

namespace {

bool in_component(const IntervalComponent& J, const SignedPoint& x) {
    if (x.side == Side::plus) return J.lo <= x.value && x.value < J.hi;
    return J.lo < x.value && x.value <= J.hi;
}

Chain compute_chain(const ParamVector& p, const IntervalComponent& J,
                    const SignedPoint& start, long budget) {
    Chain ch;
    ch.start = start;
    SignedPoint cur = start;
    for (long t = 0;; ++t) {
        if (t >= 1 && in_component(J, cur)) {
            ch.return_time = t;
            return ch;
        }
        if (t > budget) throw Error("budget-exceeded", "chain of " + to_string(start));
        if (auto d = discontinuity_index(p, cur.value)) ch.hits.push_back({t, *d});
        ch.itinerary.push_back(branch_index(p, cur));
        cur = apply(p, cur);
    }
}

}  // namespace

SignedPoint return_map_apply(const ParamVector& p, const IntervalComponent& J,
                             const SignedPoint& x, long budget) {
    SignedPoint cur = x;
    for (long t = 1; t <= budget; ++t) {
        cur = apply(p, cur);
        if (in_component(J, cur)) return cur;
    }
    throw Error("budget-exceeded", "no return of " + to_string(x));
}

ReturnMapData compute_return_map(const ParamVector& p, const IntervalSet& X,
                                 const IntervalComponent& J, long budget) {
    require_valid(p);
    {
        bool is_component = false;
        for (const auto& iv : X.intervals())
            if (iv.lo == J.lo && iv.hi == J.hi) is_component = true;
        if (!is_component) throw Error("bad-component", "J is not a component of X");
        if (!(image_interval_set(p, X) == X))
            throw Error("not-finite-type", "X is not exactly invariant");
    }

    struct Piece {
        Rat lo, hi;
        long t;
        Rat offset;  // current = origin + offset
    };
    std::deque<Piece> work;
    work.push_back({J.lo, J.hi, 0, Rat(0)});

    std::map<Rat, long> landings;  // interior preimage point -> first landing time
    struct Done {
        Rat lo, hi;  // origin
        long t;
        Rat tr;
    };
    std::vector<Done> done;

    while (!work.empty()) {
        Piece pc = work.front();
        work.pop_front();
        if (pc.t > budget) throw Error("budget-exceeded", "return-map worklist");
        if (pc.t >= 1) {
            if (J.lo <= pc.lo && pc.hi <= J.hi) {
                done.push_back({pc.lo - pc.offset, pc.hi - pc.offset, pc.t, pc.offset});
                continue;
            }
            // split at J's endpoints so partial overlaps never pass silently
            if (pc.lo < J.lo && J.lo < pc.hi) {
                work.push_back({pc.lo, J.lo, pc.t, pc.offset});
                work.push_back({J.lo, pc.hi, pc.t, pc.offset});
                continue;
            }
            if (pc.lo < J.hi && J.hi < pc.hi) {
                work.push_back({pc.lo, J.hi, pc.t, pc.offset});
                work.push_back({J.hi, pc.hi, pc.t, pc.offset});
                continue;
            }
        }
        // split at actual discontinuities of T (gamma differs across beta_i),
        // then translate each part
        std::vector<Rat> cuts{pc.lo};
        for (int i = 1; i <= p.r - 1; ++i) {
            if (p.gamma[i - 1] == p.gamma[i]) continue;
            if (pc.lo < p.beta[i] && p.beta[i] < pc.hi) {
                cuts.push_back(p.beta[i]);
                Rat pre = p.beta[i] - pc.offset;
                auto it = landings.find(pre);
                if (it == landings.end() || pc.t < it->second) landings[pre] = pc.t;
            }
        }
        cuts.push_back(pc.hi);
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            int br = branch_index(p, SignedPoint{cuts[k], Side::plus});
            const Rat& g = p.gamma_of(br);
            work.push_back({cuts[k] + g, cuts[k + 1] + g, pc.t + 1, pc.offset + g});
        }
    }

    ReturnMapData d;
    d.J = J;
    std::sort(done.begin(), done.end(),
              [](const Done& a, const Done& b) { return a.lo < b.lo; });
    d.a.push_back(J.lo);
    for (size_t k = 0; k < done.size(); ++k) {
        if (done[k].lo != d.a.back())
            throw Error("internal", "return-map branches do not tile J");
        Branch b;
        b.lo = done[k].lo;
        b.hi = done[k].hi;
        b.return_time = done[k].t;
        b.translation = done[k].tr;
        // recover the branch itinerary from an interior representative
        SignedPoint rep{(b.lo + b.hi) / 2, Side::plus};
        for (long t = 0; t < b.return_time; ++t) {
            b.itinerary.push_back(branch_index(p, rep));
            rep = apply(p, rep);
        }
        d.branches.push_back(std::move(b));
        d.a.push_back(done[k].hi);
    }
    if (d.a.back() != J.hi) throw Error("internal", "return-map branches do not reach y");
    d.N = (int)d.branches.size();

    // landing times of the interior branch points
    d.landing_time.assign(d.N + 1, -1);
    for (int j = 1; j <= d.N - 1; ++j) {
        auto it = landings.find(d.a[j]);
        if (it == landings.end())
            throw Error("internal", "interior branch point without a landing");
        d.landing_time[j] = it->second;
    }

    // permutation: sigma(j) = left-to-right rank of the image of J_j
    std::vector<int> order(d.N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return d.branches[x].lo + d.branches[x].translation <
               d.branches[y].lo + d.branches[y].translation;
    });
    d.sigma.assign(d.N + 1, 0);
    d.tau.assign(d.N + 1, 0);
    for (int rank = 1; rank <= d.N; ++rank) {
        int j = order[rank - 1] + 1;
        d.sigma[j] = rank;
        d.tau[rank] = j;
    }

    // signed chains for every branch point
    d.plus_chains.resize(d.N);
    d.minus_chains.resize(d.N + 1);
    for (int j = 0; j <= d.N - 1; ++j)
        d.plus_chains[j] = compute_chain(p, J, SignedPoint{d.a[j], Side::plus}, budget);
    for (int j = 1; j <= d.N; ++j)
        d.minus_chains[j] = compute_chain(p, J, SignedPoint{d.a[j], Side::minus}, budget);
    d.a0_lands = !d.plus_chains[0].hits.empty();
    d.aN_lands = !d.minus_chains[d.N].hits.empty();

    auto first_real_hit = [&](const Chain& c) -> const Chain::Hit* {
        for (const auto& h : c.hits)
            if (p.gamma[h.disc - 1] != p.gamma[h.disc]) return &h;
        return nullptr;
    };
    for (int j = 1; j <= d.N - 1; ++j) {
        const Chain::Hit* ph = first_real_hit(d.plus_chains[j]);
        const Chain::Hit* mh = first_real_hit(d.minus_chains[j]);
        if (!ph || !mh || ph->time != d.landing_time[j] ||
            mh->time != d.landing_time[j] || ph->disc != mh->disc)
            throw Error("internal", "first landing of a_j differs between sides");
    }
    return d;
}

ComponentClass classify_component(const ReturnMapData& d) {
    return d.N == 1 ? ComponentClass::dynamically_trivial
                    : ComponentClass::dynamically_non_trivial;
}

RotationClass rotation_classification(const ReturnMapData& d) {
    bool all_zero = true;
    for (const auto& b : d.branches)
        if (b.translation != 0) all_zero = false;
    if (all_zero) return {RotationClass::identity, Rat(0)};
    if (d.N == 2 && d.sigma[1] == 2 && d.branches[0].translation > 0 &&
        d.branches[1].translation == d.branches[0].translation - d.length()) {
        return {RotationClass::rotation, Rat(d.branches[0].translation / d.length())};
    }
    return {RotationClass::not_a_rotation, Rat(0)};
}

}  // namespace itm
