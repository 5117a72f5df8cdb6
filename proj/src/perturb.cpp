#include "itm/perturb.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>

namespace itm {

std::string to_string(PerturbStatus s) {
    switch (s) {
        case PerturbStatus::success: return "success";
        case PerturbStatus::infeasible: return "infeasible";
        case PerturbStatus::verification_failed: return "verification-failed";
    }
    return "?";
}

Rat best_rational_approx(const Rat& x, const Int& max_denominator) {
    if (max_denominator < 1) throw Error("invalid-argument", "max_denominator must be >= 1");
    if (rat_den(x) <= max_denominator) return x;
    // Continued-fraction walk; the best approximation is either the last
    // convergent with denominator in range or the best semiconvergent.
    Int h0 = 0, k0 = 1, h1 = 1, k1 = 0;  // h_{-2}/k_{-2}, h_{-1}/k_{-1}
    Int num = rat_num(x), den = rat_den(x);
    bool neg = num < 0;
    if (neg) num = -num;
    Rat ax(num, den);
    while (true) {
        Int a = num / den;
        Int h2 = a * h1 + h0, k2 = a * k1 + k0;
        if (k2 > max_denominator) {
            Int t = (max_denominator - k0) / k1;  // largest semiconvergent step
            Rat conv = Rat(h1, k1);
            Rat semi = Rat(t * h1 + h0, t * k1 + k0);
            Rat best = rat_abs(ax - semi) < rat_abs(ax - conv) ? semi : conv;
            return neg ? Rat(-best) : best;
        }
        h0 = h1; k0 = k1; h1 = h2; k1 = k2;
        Int rem = num - a * den;
        if (rem == 0) return neg ? Rat(-Rat(h1, k1)) : Rat(h1, k1);
        num = den;
        den = rem;
    }
}

ParamVector rationalize(const ParamVector& p, const Int& max_denominator) {
    require_valid(p);
    ParamVector q = p;
    for (int i = 1; i <= p.r - 1; ++i) q.beta[i] = best_rational_approx(p.beta[i], max_denominator);
    for (int i = 1; i <= p.r - 1; ++i)
        if (!(q.beta[i - 1] < q.beta[i]) || !(q.beta[i] < 1))
            throw Error("infeasible", "rounded betas collide at index " + std::to_string(i));
    for (int s = 1; s <= p.r; ++s) {
        Rat g = best_rational_approx(p.gamma[s - 1], max_denominator);
        Rat lo = -q.beta[s - 1], hi = 1 - q.beta[s];
        if (g < lo) g = lo;
        if (g > hi) g = hi;
        q.gamma[s - 1] = g;
    }
    require_valid(q);
    return q;
}

namespace {

bool signed_in(const Interval& iv, const SignedPoint& x) {
    if (x.side == Side::plus) return iv.lo <= x.value && x.value < iv.hi;
    return iv.lo < x.value && x.value <= iv.hi;
}

std::vector<long> branch_prefix_counts(const std::vector<int>& itinerary, size_t len, int r) {
    std::vector<long> k(r, 0);
    for (size_t t = 0; t < len && t < itinerary.size(); ++t) ++k[itinerary[t] - 1];
    return k;
}

DeltaConstraint tr_con(int r, const std::vector<long>& k, const Rat& rhs, std::string label) {
    DeltaConstraint c{std::vector<Rat>(r, Rat(0)), std::vector<Rat>(r - 1, Rat(0)), rhs,
                      std::move(label)};
    for (int s = 0; s < r; ++s) c.e[s] = k[s];
    return c;
}

// Pins the landing preimage beta[disc] - sum(prefix gammas): dbeta_disc -
// sum k_s dgamma_s = 0.
DeltaConstraint pin_con(int r, int disc, const std::vector<long>& k, std::string label) {
    DeltaConstraint c{std::vector<Rat>(r, Rat(0)), std::vector<Rat>(r - 1, Rat(0)), Rat(0),
                      std::move(label)};
    for (int s = 0; s < r; ++s) c.e[s] = -Rat(k[s]);
    c.f[disc - 1] = 1;
    return c;
}

// T^n(beta_src) - beta_dst changes by dbeta_src + sum k dgamma - dbeta_dst.
DeltaConstraint conn_con(int r, int src, const std::vector<long>& k, int dst, const Rat& rhs,
                         std::string label) {
    DeltaConstraint c{std::vector<Rat>(r, Rat(0)), std::vector<Rat>(r - 1, Rat(0)), rhs,
                      std::move(label)};
    for (int s = 0; s < r; ++s) c.e[s] = k[s];
    c.f[src - 1] += 1;
    c.f[dst - 1] -= 1;
    return c;
}

// Optional wall-clock cap on a stage's candidate search. Checked between
// candidates only, so a single verification always runs to completion.
struct StageTimer {
    bool limited = false;
    std::chrono::steady_clock::time_point end;
    explicit StageTimer(long ms) {
        if (ms > 0) {
            limited = true;
            end = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
        }
    }
    bool expired() const { return limited && std::chrono::steady_clock::now() >= end; }
};

long capped_budget(const ParamVector& p, long cap) {
    try {
        return stabilization_budget(p, cap);
    } catch (const Error&) {
        return cap;
    }
}

// Preservation constraints for the critical points whose orbits stay clear of
// the interval being reworked, in three strengths.
struct Preservation {
    std::vector<DeltaConstraint> strong;  // exact landings of non-periodic criticals
    std::vector<DeltaConstraint> closures;    // period closures of periodic criticals
    std::vector<DeltaConstraint> tails;       // eventual-cycle closures (no landing)
    std::vector<DeltaRequest::Claim> strong_claims;
    std::vector<DeltaRequest::Claim> closure_claims;
};

Preservation preservation_for(const ParamVector& p, const Interval& protected_iv, long budget) {
    Preservation out;
    for (int i = 1; i <= p.r - 1; ++i) {
        for (Side s : {Side::plus, Side::minus}) {
            SignedPoint c{p.beta[i], s};
            OrbitRecord rec = orbit_record(p, c, budget);
            if (!rec.period) continue;
            auto meets_up_to = [&](size_t upto) {
                for (size_t t = 0; t < rec.points.size() && t <= upto; ++t)
                    if (signed_in(protected_iv, rec.points[t])) return true;
                return false;
            };
            if (rec.periodic_from_start()) {
                if (meets_up_to(rec.points.size())) continue;
                EntryCounts k = entry_counts_and_translation(p, c, *rec.period);
                out.closures.push_back(
                    conn_con(p.r, i, k.counts, i, Rat(0),
                             "closure b" + std::to_string(i) + side_char(s)));
                out.closure_claims.push_back({i, s, *rec.period, i, Rat(0)});
                continue;
            }
            auto fl = rec.first_proper_landing();
            if (fl && !meets_up_to((size_t)fl->time)) {
                EntryCounts k = entry_counts_and_translation(p, c, fl->time);
                out.strong.push_back(conn_con(p.r, i, k.counts, fl->disc, Rat(0),
                                              "landing b" + std::to_string(i) + side_char(s)));
                out.strong_claims.push_back({i, s, fl->time, fl->disc, Rat(0)});
            } else if (!fl && !meets_up_to(rec.points.size())) {
                std::vector<long> k =
                    branch_prefix_counts(rec.branches, rec.branches.size(), p.r);
                for (size_t t = 0; t < (size_t)rec.preperiod && t < rec.branches.size(); ++t)
                    --k[rec.branches[t] - 1];
                out.tails.push_back(tr_con(p.r, k, Rat(0),
                                           "tail b" + std::to_string(i) + side_char(s)));
            }
        }
    }
    return out;
}

// Tier t of the constraint stack: 0 = everything, then progressively drop
// boundary pins, tail closures, landings, and finally all preservation.
DeltaRequest assemble(const Rat& eps, const std::vector<DeltaConstraint>& core,
                      const std::vector<DeltaConstraint>& boundary_pins, const Preservation& pres,
                      int tier) {
    DeltaRequest req;
    req.eps = eps;
    req.constraints = core;
    auto add = [&](const std::vector<DeltaConstraint>& v) {
        req.constraints.insert(req.constraints.end(), v.begin(), v.end());
    };
    if (tier <= 0) add(boundary_pins);
    if (tier <= 3) add(pres.closures);
    if (tier <= 2) {
        add(pres.strong);
        req.claims.insert(req.claims.end(), pres.strong_claims.begin(), pres.strong_claims.end());
    }
    if (tier <= 1) add(pres.tails);
    if (tier <= 3)
        req.claims.insert(req.claims.end(), pres.closure_claims.begin(),
                          pres.closure_claims.end());
    return req;
}

constexpr int kTiers = 5;

Rat param_distance(const ParamVector& a, const ParamVector& b) {
    Rat d(0);
    for (int s = 0; s < a.r; ++s) d = std::max(d, rat_abs(a.gamma[s] - b.gamma[s]));
    for (int i = 1; i <= a.r - 1; ++i) d = std::max(d, rat_abs(a.beta[i] - b.beta[i]));
    return d;
}

// Point cycles of the periodic discontinuities contained in X (the orbit of
// the point beta_i is its plus orbit); classes with >= 2 discs are the
// non-trivial cycles.
std::vector<std::vector<int>> point_cycle_classes(const ParamVector& p, const IntervalSet& X,
                                                  long budget) {
    std::vector<int> parent(p.r + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::set<int> members;
    for (int i = 1; i <= p.r - 1; ++i) {
        SignedPoint pt{p.beta[i], Side::plus};
        if (!X.contains(pt)) continue;
        OrbitRecord rec = orbit_record(p, pt, budget);
        if (!rec.period || !rec.periodic_from_start()) continue;
        members.insert(i);
        for (const auto& l : rec.landings) {
            members.insert(l.disc);
            parent[find(i)] = find(l.disc);
        }
    }
    std::map<int, std::vector<int>> cls;
    for (int i : members) cls[find(i)].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [root, v] : cls) {
        std::sort(v.begin(), v.end());
        out.push_back(std::move(v));
    }
    return out;
}

struct VerifyResult {
    bool ok = false;
    std::string detail;
    long u = -1;
    bool finite = false;
};

// Postconditions every perturbation stage needs: validity was already
// checked; here we recompute finite type, eventual periodicity of all
// critical orbits, and U on the output map.
VerifyResult verify_map_state(const ParamVector& q, long cap) {
    VerifyResult v;
    long bud = capped_budget(q, cap);
    AttractorResult att = compute_attractor(q, bud);
    if (!att.finite_type) {
        v.detail = "not finite type within budget";
        return v;
    }
    v.finite = true;
    CriticalClassification cc = critical_classification(q, 2 * bud);
    for (const auto& e : cc.entries)
        if (e.cls == CritClass::undecided) {
            v.detail = "critical orbit " + to_string(e.pt) + " did not close";
            return v;
        }
    try {
        v.u = unstable_number(q, att.X, 2 * bud);
    } catch (const Error& e) {
        v.detail = std::string("unstable number: ") + e.what();
        return v;
    }
    v.ok = true;
    return v;
}

}  // namespace

PerturbationOutcome realize_deltas(const ParamVector& p, const DeltaRequest& req) {
    require_valid(p);
    const int r = p.r;
    const int n = 2 * r - 1;
    const size_t m = req.constraints.size();

    std::vector<std::vector<Rat>> M0(m, std::vector<Rat>(n + 1, Rat(0)));
    for (size_t i = 0; i < m; ++i) {
        const DeltaConstraint& c = req.constraints[i];
        for (int s = 0; s < r; ++s) M0[i][s] = c.e[s];
        for (int j = 0; j < r - 1; ++j) M0[i][r + j] = c.f[j];
        M0[i][n] = c.rhs;
    }

    // Exact reduced row echelon form with the given pivot column preference;
    // variables without a pivot stay zero.
    auto solve = [&](const std::vector<int>& cols, std::vector<Rat>& x) -> bool {
        std::vector<std::vector<Rat>> M = M0;
        std::vector<int> pivot_col;
        size_t row = 0;
        for (int col : cols) {
            if (row >= m) break;
            size_t pr = row;
            while (pr < m && M[pr][col] == 0) ++pr;
            if (pr == m) continue;
            std::swap(M[row], M[pr]);
            Rat pv = M[row][col];
            for (int c2 = 0; c2 <= n; ++c2) M[row][c2] /= pv;
            for (size_t r2 = 0; r2 < m; ++r2) {
                if (r2 == row || M[r2][col] == 0) continue;
                Rat f = M[r2][col];
                for (int c2 = 0; c2 <= n; ++c2) M[r2][c2] -= f * M[row][c2];
            }
            pivot_col.push_back(col);
            ++row;
        }
        for (size_t r2 = row; r2 < m; ++r2)
            if (M[r2][n] != 0) return false;
        x.assign(n, Rat(0));
        for (size_t i = 0; i < pivot_col.size(); ++i) x[pivot_col[i]] = M[i][n];
        return true;
    };

    auto check = [&](const std::vector<Rat>& x) -> PerturbationOutcome {
        PerturbationOutcome out;
        out.result = p;
        out.dgamma.assign(x.begin(), x.begin() + r);
        out.dbeta.assign(x.begin() + r, x.end());
        for (const Rat& d : x)
            if (rat_abs(d) > req.eps) {
                out.status = PerturbStatus::verification_failed;
                out.detail = "realized delta exceeds the bound " + rat_str(req.eps);
                return out;
            }
        ParamVector q = p;
        for (int s = 0; s < r; ++s) q.gamma[s] += x[s];
        for (int i = 1; i <= r - 1; ++i) q.beta[i] += x[r + i - 1];
        if (auto viol = validate_itm(q); !viol.empty()) {
            out.status = PerturbStatus::verification_failed;
            out.detail = "perturbed map leaves the polytope: " + viol.front().constraint;
            return out;
        }
        for (const auto& cl : req.claims) {
            SignedPoint pt{q.beta[cl.disc], cl.side};
            bool bad = false;
            try {
                for (long t = 0; t < cl.time; ++t) pt = apply(q, pt);
            } catch (const Error&) {
                bad = true;
            }
            if (bad || pt.value != q.beta[cl.target] + cl.offset) {
                out.status = PerturbStatus::verification_failed;
                out.detail = "claim failed: b" + std::to_string(cl.disc) + side_char(cl.side) +
                             " at time " + std::to_string(cl.time);
                return out;
            }
        }
        out.result = q;
        out.distance = param_distance(p, q);
        out.status = PerturbStatus::success;
        return out;
    };

    // The canonical pivot preference (gammas first, then betas) is tried
    // first; when its solution lands outside the polytope or the delta bound,
    // demoting one column at a time redistributes the solution over other
    // variables within the same affine solution set.
    std::vector<int> natural(n);
    std::iota(natural.begin(), natural.end(), 0);
    std::vector<Rat> x;
    if (!solve(natural, x)) {
        PerturbationOutcome out;
        out.result = p;
        out.dgamma.assign(r, Rat(0));
        out.dbeta.assign(r - 1, Rat(0));
        out.status = PerturbStatus::infeasible;
        out.detail = "inconsistent constraint system";
        return out;
    }
    PerturbationOutcome first = check(x);
    if (first.ok()) return first;
    for (int c = 0; c + 1 < n; ++c) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (j != c) cols.push_back(j);
        cols.push_back(c);
        if (!solve(cols, x)) continue;
        PerturbationOutcome out = check(x);
        if (out.ok()) return out;
    }
    return first;
}

PerturbationOutcome perturb_to_correspondence(const ParamVector& p, const Rat& eps,
                                              const PerturbOptions& opt) {
    require_valid(p);
    if (!(eps > 0)) throw Error("validation", "eps must be positive");
    PerturbationOutcome out;
    out.result = p;
    {
        long bud = capped_budget(p, opt.budget_cap);
        AttractorResult att = compute_attractor(p, bud);
        if (!att.finite_type) {
            out.status = PerturbStatus::verification_failed;
            out.detail = "input not finite type within budget";
            return out;
        }
        out.unstable_before = unstable_number(p, att.X, 2 * bud);
    }
    ParamVector cur = p;
    StageTimer timer(opt.time_budget_ms);
    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (timer.expired()) {
            out.status = PerturbStatus::verification_failed;
            out.detail = "time budget exhausted";
            return out;
        }
        long bud = capped_budget(cur, opt.budget_cap);
        AttractorResult att = compute_attractor(cur, bud);
        if (!att.finite_type) {
            out.status = PerturbStatus::verification_failed;
            out.detail = "intermediate map not finite type";
            return out;
        }
        // Leftmost failing side, plus before minus.
        int fail_disc = -1;
        Side fail_side = Side::plus;
        long fail_period = 0;
        Interval fail_P;
        for (int i = 1; i <= cur.r - 1 && fail_disc < 0; ++i) {
            for (Side s : {Side::plus, Side::minus}) {
                SignedPoint pt{cur.beta[i], s};
                if (!att.X.contains(pt)) continue;
                OrbitRecord rec = orbit_record(cur, pt, 2 * bud);
                if (!rec.period || !rec.periodic_from_start()) continue;
                Interval P = maximal_periodic_interval(cur, pt, *rec.period);
                OrbitRecord orec = orbit_record(cur, {cur.beta[i], opposite(s)}, 2 * bud);
                bool landed = false;
                for (const auto& q : orec.points)
                    if (signed_in(P, q)) { landed = true; break; }
                if (!landed) {
                    fail_disc = i;
                    fail_side = s;
                    fail_period = *rec.period;
                    fail_P = P;
                    break;
                }
            }
        }
        if (fail_disc < 0) {
            VerifyResult v = verify_map_state(cur, opt.budget_cap);
            if (!v.ok) {
                out.status = PerturbStatus::verification_failed;
                out.detail = v.detail;
                return out;
            }
            if (v.u > out.unstable_before) {
                out.status = PerturbStatus::verification_failed;
                out.detail = "unstable number increased";
                return out;
            }
            out.result = cur;
            out.unstable_after = v.u;
            out.correspondence_after = true;
            out.rounds = iter;
            out.distance = param_distance(p, cur);
            out.status = PerturbStatus::success;
            return out;
        }
        SignedPoint pt{cur.beta[fail_disc], fail_side};
        EntryCounts k = entry_counts_and_translation(cur, pt, fail_period);
        Preservation pres = preservation_for(cur, fail_P, 2 * bud);
        bool advanced = false;
        for (int attempt = 0; attempt < opt.max_retries && !advanced; ++attempt) {
            Rat e = eps;
            for (int h = 0; h < iter + attempt + 1; ++h) e /= 2;
            Rat len = fail_P.hi - fail_P.lo;
            while (e > len / 4) e /= 2;
            std::vector<DeltaConstraint> core = {tr_con(
                cur.r, k.counts, fail_side == Side::plus ? Rat(-e) : e, "tr-shift")};
            for (int tier = 0; tier < kTiers && !advanced; ++tier) {
                if (timer.expired()) break;
                DeltaRequest req = assemble(e, core, {}, pres, tier);
                PerturbationOutcome step = realize_deltas(cur, req);
                if (!step.ok()) continue;  // next tier, then smaller eps
                VerifyResult v = verify_map_state(step.result, opt.budget_cap);
                if (!v.ok || v.u > out.unstable_before) continue;
                cur = step.result;
                advanced = true;
            }
        }
        if (!advanced) {
            out.status = PerturbStatus::verification_failed;
            out.detail = "no admissible shift at b" + std::to_string(fail_disc) +
                         side_char(fail_side);
            out.result = cur;
            return out;
        }
    }
    out.status = PerturbStatus::verification_failed;
    out.detail = "correspondence did not settle within the iteration cap";
    out.result = cur;
    return out;
}

namespace {

// Spatial boundaries v_0 < ... < v_N of the return-map images: image k (in
// space) is [v_{k-1}, v_k) and belongs to branch tau(k).
std::vector<Rat> spatial_values(const ReturnMapData& d) {
    std::vector<Rat> v(d.N + 1);
    v[0] = d.J.lo;
    for (int k = 1; k <= d.N; ++k)
        v[k] = v[k - 1] + (d.a[d.tau[k]] - d.a[d.tau[k] - 1]);
    return v;
}

int rj_branch_of(const ReturnMapData& d, const Rat& x) {
    for (int j = 1; j <= d.N; ++j)
        if (d.a[j - 1] <= x && x < d.a[j]) return j;
    throw Error("internal", "point outside the return interval");
}

Rat rj_step(const ReturnMapData& d, const Rat& x) {
    return x + d.branches[rj_branch_of(d, x) - 1].translation;
}

Rat rj_back(const ReturnMapData& d, const std::vector<Rat>& vs, const Rat& x) {
    for (int k = 1; k <= d.N; ++k)
        if (vs[k - 1] <= x && x < vs[k])
            return x - d.branches[d.tau[k] - 1].translation;
    throw Error("internal", "point outside the return image");
}

// The branch pair that opens a hole around critical value v_i: A shifts by
// -eps1, B by +eps2. Values at the spatial ends are reachable only through
// the wrap-around of the first/last image.
struct HoleMechanism {
    int A = 0, B = 0;
};

std::optional<HoleMechanism> hole_mechanism(const ReturnMapData& d, int i) {
    HoleMechanism m;
    if (i >= 2) m.A = d.tau[i];
    else if (d.sigma[d.N] == i) m.A = d.tau[d.N];
    else return std::nullopt;
    if (i <= d.N - 2) m.B = d.tau[i + 1];
    else if (d.sigma[1] == i + 1) m.B = d.tau[1];
    else return std::nullopt;
    if (m.A == m.B) return std::nullopt;
    return m;
}

struct HolePlan {
    int v_index = 0;   // critical value the hole opens around
    HoleMechanism mech;
    long a = 0, b = 0;  // visits of the value orbit to branches A and B
    long P = 0;         // steps until the first critical point
};

// Follows the return orbit of v_i until it first hits an interior critical
// point, counting the visits to the two perturbed branches on the way.
std::optional<HolePlan> plan_for_value(const ReturnMapData& d, int i, long step_cap) {
    auto mech = hole_mechanism(d, i);
    if (!mech) return std::nullopt;
    std::vector<Rat> vs = spatial_values(d);
    HolePlan plan;
    plan.v_index = i;
    plan.mech = *mech;
    Rat x = vs[i];
    for (long t = 0; t < step_cap; ++t) {
        bool at_critical = false;
        for (int q = 1; q <= d.N - 1; ++q)
            if (x == d.a[q]) { at_critical = true; break; }
        if (at_critical) {
            plan.P = t;
            return plan;
        }
        int j = rj_branch_of(d, x);
        if (j == plan.mech.A) ++plan.a;
        if (j == plan.mech.B) ++plan.b;
        x = x + d.branches[j - 1].translation;
    }
    return std::nullopt;
}

// For N = 3 the hole is opened around the first critical value in the
// backward return orbit of the offending critical point.
std::optional<int> backwalk_value(const ReturnMapData& d, int p_target, long step_cap) {
    std::vector<Rat> vs = spatial_values(d);
    Rat y = d.a[p_target];
    for (long t = 0; t < step_cap; ++t) {
        for (int i = 1; i <= d.N - 1; ++i)
            if (y == vs[i]) return i;
        y = rj_back(d, vs, y);
    }
    return std::nullopt;
}

std::vector<DeltaConstraint> component_pins(const ParamVector& p, const ReturnMapData& d,
                                            bool include_interior) {
    std::vector<DeltaConstraint> pins;
    if (include_interior) {
        for (int q = 1; q <= d.N - 1; ++q) {
            const Chain& ch = d.plus_chains[q];
            long lt = d.landing_time[q];
            int disc = -1;
            for (const auto& h : ch.hits)
                if (h.time == lt) { disc = h.disc; break; }
            if (disc < 0) continue;
            pins.push_back(pin_con(p.r, disc, branch_prefix_counts(ch.itinerary, (size_t)lt, p.r),
                                   "pin a" + std::to_string(q)));
        }
    }
    return pins;
}

std::vector<DeltaConstraint> boundary_pins(const ParamVector& p, const ReturnMapData& d) {
    std::vector<DeltaConstraint> pins;
    if (d.a0_lands && !d.plus_chains[0].hits.empty()) {
        const Chain& ch = d.plus_chains[0];
        pins.push_back(pin_con(p.r, ch.hits.front().disc,
                               branch_prefix_counts(ch.itinerary, (size_t)ch.hits.front().time, p.r),
                               "pin a0"));
    }
    if (d.aN_lands && !d.minus_chains[d.N].hits.empty()) {
        const Chain& ch = d.minus_chains[d.N];
        pins.push_back(pin_con(p.r, ch.hits.front().disc,
                               branch_prefix_counts(ch.itinerary, (size_t)ch.hits.front().time, p.r),
                               "pin aN"));
    }
    return pins;
}

}  // namespace

PerturbationOutcome reduce_unstable_number(const ParamVector& p, const Rat& eps,
                                           const PerturbOptions& opt) {
    require_valid(p);
    if (!(eps > 0)) throw Error("validation", "eps must be positive");
    long bud = capped_budget(p, opt.budget_cap);
    AttractorResult att = compute_attractor(p, bud);
    if (!att.finite_type) throw Error("budget-exceeded", "input not finite type within budget");
    long U0 = unstable_number(p, att.X, 2 * bud);
    if (U0 == 0) throw Error("no-offender", "unstable number is already zero");

    PerturbationOutcome out;
    out.result = p;
    out.unstable_before = U0;
    StageTimer timer(opt.time_budget_ms);
    ComponentsReport comps = components_and_boundary(p, att.X);

    std::vector<std::vector<int>> classes = point_cycle_classes(p, att.X, 2 * bud);
    std::set<int> cycle_discs;
    for (const auto& c : classes)
        if (c.size() >= 2) cycle_discs.insert(c.begin(), c.end());

    // Assemble the perturbation for the selected offender; every candidate is
    // tried with the geometric eps schedule and the constraint tiers.
    auto attempt = [&](const std::vector<DeltaConstraint>& core,
                       const std::vector<DeltaConstraint>& bpins, const Preservation& pres,
                       std::function<std::vector<DeltaConstraint>(const Rat&)> core_scaled,
                       const Rat& base_eps) -> bool {
        for (int k = 0; k < opt.max_retries; ++k) {
            Rat e = base_eps;
            for (int h = 0; h < k; ++h) e /= 2;
            std::vector<DeltaConstraint> sc = core_scaled ? core_scaled(e) : core;
            for (int tier = 0; tier < kTiers; ++tier) {
                if (timer.expired()) {
                    out.detail = "time budget exhausted";
                    return false;
                }
                DeltaRequest req = assemble(e, sc, bpins, pres, tier);
                PerturbationOutcome step = realize_deltas(p, req);
                if (step.status == PerturbStatus::infeasible) {
                    out.detail = step.detail;
                    continue;
                }
                if (!step.ok()) {
                    out.detail = step.detail;
                    continue;
                }
                VerifyResult v = verify_map_state(step.result, opt.budget_cap);
                if (!v.ok) {
                    out.detail = v.detail;
                    continue;
                }
                if (v.u >= U0) {
                    out.detail = "unstable number did not decrease (" + std::to_string(v.u) + ")";
                    continue;
                }
                out = step;
                out.unstable_before = U0;
                out.unstable_after = v.u;
                out.distance = param_distance(p, step.result);
                return true;
            }
        }
        return false;
    };

    if (!cycle_discs.empty()) {
        // Interior cycles: pick the component with the maximal number of
        // return branches among those containing an offending disc as a point.
        std::map<int, ReturnMapData> rms;
        int best_comp = -1, best_N = -1;
        for (int d : cycle_discs) {
            for (const auto& c : comps.components) {
                if (!(c.lo <= p.beta[d] && p.beta[d] < c.hi)) continue;
                if (!rms.count(c.index))
                    rms.emplace(c.index, compute_return_map(p, att.X, c, 2 * bud));
                int N = rms.at(c.index).N;
                if (N > best_N) { best_N = N; best_comp = c.index; }
                break;
            }
        }
        if (best_comp < 0) {
            out.status = PerturbStatus::infeasible;
            out.detail = "offending cycle disc lies in no component";
            return out;
        }
        const ReturnMapData& d = rms.at(best_comp);
        // Scale of the tiling: the maximal periodic interval of the leftmost
        // offending periodic disc.
        Rat plen;
        {
            int d0 = *cycle_discs.begin();
            for (int disc : cycle_discs)
                if (comps.components[best_comp].lo <= p.beta[disc] &&
                    p.beta[disc] < comps.components[best_comp].hi) { d0 = disc; break; }
            OrbitRecord rec = orbit_record(p, {p.beta[d0], Side::plus}, 2 * bud);
            if (!rec.period || !rec.periodic_from_start()) {
                out.status = PerturbStatus::infeasible;
                out.detail = "offending disc is not periodic from the start";
                return out;
            }
            Interval P = maximal_periodic_interval(p, {p.beta[d0], Side::plus}, *rec.period);
            plen = P.hi - P.lo;
        }
        Rat base = plen;
        while (base > eps || base > plen / 8) base /= 2;
        Interval Jiv{d.J.lo, d.J.hi};
        Preservation pres = preservation_for(p, Jiv, 2 * bud);
        std::vector<DeltaConstraint> bpins = boundary_pins(p, d);

        if (d.N >= 2) {
            // Offending critical points of the return map: interior branch
            // points landing on a disc of a non-trivial cycle.
            std::vector<int> target_qs;
            for (int q = 1; q <= d.N - 1; ++q) {
                const Chain& ch = d.plus_chains[q];
                for (const auto& h : ch.hits)
                    if (h.time == d.landing_time[q] && cycle_discs.count(h.disc)) {
                        target_qs.push_back(q);
                        break;
                    }
            }
            if (d.N == 2) {
                // Single interior critical point; push both ends of J out of
                // the image and offset its first outgoing connection.
                if (target_qs.empty()) {
                    out.status = PerturbStatus::infeasible;
                    out.detail = "no interior offender in the selected component";
                    return out;
                }
                int disc = -1;
                for (const auto& h : d.plus_chains[1].hits)
                    if (h.time == d.landing_time[1]) { disc = h.disc; break; }
                OrbitRecord rec = orbit_record(p, {p.beta[disc], Side::plus}, 2 * bud);
                std::optional<Landing> conn;
                for (const auto& l : rec.landings)
                    if (l.time >= 1) { conn = l; break; }
                if (!conn) {
                    out.status = PerturbStatus::infeasible;
                    out.detail = "offender has no outgoing connection";
                    return out;
                }
                EntryCounts kc = entry_counts_and_translation(p, {p.beta[disc], Side::plus},
                                                              conn->time);
                std::vector<std::vector<long>> bk;
                for (int j = 1; j <= d.N; ++j)
                    bk.push_back(branch_prefix_counts(d.branches[j - 1].itinerary,
                                                      d.branches[j - 1].itinerary.size(), p.r));
                int A = d.tau[2], B = d.tau[1];
                int disc_c = disc;
                auto scaled = [&, A, B, disc_c, kc, bk](const Rat& e) {
                    std::vector<DeltaConstraint> core;
                    for (int j = 1; j <= d.N; ++j) {
                        Rat rhs(0);
                        if (j == A) rhs = -e;
                        if (j == B) rhs = e;
                        core.push_back(tr_con(p.r, bk[j - 1], rhs, "tr J" + std::to_string(j)));
                    }
                    DeltaConstraint pinb{std::vector<Rat>(p.r, Rat(0)),
                                         std::vector<Rat>(p.r - 1, Rat(0)), Rat(0), "pin offender"};
                    pinb.f[disc_c - 1] = 1;
                    core.push_back(pinb);
                    core.push_back(conn_con(p.r, disc_c, kc.counts, conn->disc, e, "offset conn"));
                    return core;
                };
                if (attempt({}, bpins, pres, scaled, base)) {
                    out.status = PerturbStatus::success;
                    return out;
                }
                out.status = PerturbStatus::verification_failed;
                if (out.detail.empty()) out.detail = "two-branch reduction failed";
                return out;
            }
            // N >= 3: open a hole around a critical value feeding an offender.
            std::vector<int> candidates;
            if (d.N >= 4) {
                candidates.push_back(2);
                for (int i = 1; i <= d.N - 1; ++i)
                    if (i != 2) candidates.push_back(i);
            } else {
                if (!target_qs.empty())
                    if (auto i = backwalk_value(d, target_qs.front(), 4 * bud))
                        candidates.push_back(*i);
                for (int i = 1; i <= d.N - 1; ++i)
                    if (candidates.empty() || i != candidates.front()) candidates.push_back(i);
            }
            std::vector<std::vector<long>> bk;
            for (int j = 1; j <= d.N; ++j)
                bk.push_back(branch_prefix_counts(d.branches[j - 1].itinerary,
                                                  d.branches[j - 1].itinerary.size(), p.r));
            std::vector<DeltaConstraint> pins = component_pins(p, d, true);
            for (int i : candidates) {
                auto plan = plan_for_value(d, i, 4 * bud);
                if (!plan) continue;
                // eps1 : eps2 = (2b+1) : (2a+1) satisfies the drift window
                // -eps2 < -a eps1 + b eps2 < eps1 in both the b = 0 and b > 0
                // cases.
                Rat m1(2 * plan->b + 1), m2(2 * plan->a + 1);
                Rat mx = std::max(m1, m2);
                auto scaled = [&, plan, m1, m2, mx](const Rat& e) {
                    Rat e1 = e * m1 / mx, e2 = e * m2 / mx;
                    std::vector<DeltaConstraint> core;
                    for (int j = 1; j <= d.N; ++j) {
                        Rat rhs(0);
                        if (j == plan->mech.A) rhs = -e1;
                        if (j == plan->mech.B) rhs = e2;
                        core.push_back(tr_con(p.r, bk[j - 1], rhs, "tr J" + std::to_string(j)));
                    }
                    core.insert(core.end(), pins.begin(), pins.end());
                    return core;
                };
                if (attempt({}, bpins, pres, scaled, base)) {
                    out.status = PerturbStatus::success;
                    return out;
                }
            }
            out.status = PerturbStatus::verification_failed;
            if (out.detail.empty()) out.detail = "no workable hole mechanism";
            return out;
        }
        // N == 1: the offender sits on the boundary of its component.
        int disc = -1;
        for (int dd : cycle_discs)
            if (p.beta[dd] == d.J.lo) { disc = dd; break; }
        if (disc < 0) {
            out.status = PerturbStatus::infeasible;
            out.detail = "cycle disc inside a trivial component has no branch point";
            return out;
        }
        OrbitRecord rec = orbit_record(p, {p.beta[disc], Side::plus}, 2 * bud);
        std::optional<Landing> conn;
        if (rec.period)
            for (const auto& l : rec.landings)
                if (l.time >= 1 && l.disc != disc) { conn = l; break; }
        std::vector<long> kJ = branch_prefix_counts(d.branches[0].itinerary,
                                                    d.branches[0].itinerary.size(), p.r);
        int disc_c = disc;
        auto scaled = [&, disc_c, kJ](const Rat& e) {
            std::vector<DeltaConstraint> core = {tr_con(p.r, kJ, Rat(-e), "tr J")};
            DeltaConstraint pinb{std::vector<Rat>(p.r, Rat(0)), std::vector<Rat>(p.r - 1, Rat(0)),
                                 Rat(0), "pin offender"};
            pinb.f[disc_c - 1] = 1;
            core.push_back(pinb);
            if (conn) {
                EntryCounts kc = entry_counts_and_translation(p, {p.beta[disc_c], Side::plus},
                                                              conn->time);
                core.push_back(conn_con(p.r, disc_c, kc.counts, conn->disc, e, "offset conn"));
            }
            return core;
        };
        if (attempt({}, bpins, pres, scaled, base)) {
            out.status = PerturbStatus::success;
            return out;
        }
        out.status = PerturbStatus::verification_failed;
        if (out.detail.empty()) out.detail = "single-branch reduction failed";
        return out;
    }

    // Boundary discontinuities only: push the periodic side's return off
    // itself so the disc leaves the closure of X.
    for (int disc : comps.boundary_criticals) {
        Side side = Side::plus;
        bool found = false;
        for (const auto& sm : comps.signed_membership)
            if (sm.disc == disc && sm.in_x) {
                side = sm.side;
                found = true;
                break;
            }
        if (!found) continue;
        SignedPoint pt{p.beta[disc], side};
        OrbitRecord rec = orbit_record(p, pt, 2 * bud);
        if (!rec.period || !rec.periodic_from_start()) continue;
        Interval P = maximal_periodic_interval(p, pt, *rec.period);
        Rat plen = P.hi - P.lo;
        Rat base = plen;
        while (base > eps || base > plen / 8) base /= 2;
        EntryCounts k = entry_counts_and_translation(p, pt, *rec.period);
        Preservation pres = preservation_for(p, P, 2 * bud);
        // Pin the far end of the periodic interval through its landing.
        std::vector<DeltaConstraint> bpins;
        {
            SignedPoint far{side == Side::plus ? P.hi : P.lo, side == Side::plus ? Side::plus
                                                                                 : Side::minus};
            try {
                OrbitRecord frec = orbit_record(p, far, 2 * bud);
                if (auto fl = frec.first_proper_landing()) {
                    std::vector<long> kk = branch_prefix_counts(frec.branches, (size_t)fl->time,
                                                                p.r);
                    bpins.push_back(pin_con(p.r, fl->disc, kk, "pin far end"));
                }
            } catch (const Error&) {
            }
        }
        int disc_c = disc;
        auto kcounts = k.counts;
        // The disc coincides with a component endpoint; shrinking X past that
        // endpoint ejects the disc. A disc at the right end of its component
        // needs the periodic return pushed left (-e), at the left end right
        // (+e). Try the preferred direction first, then the other.
        int pref = side == Side::plus ? 1 : -1;
        for (const auto& c : comps.components) {
            if (p.beta[disc] == c.hi) { pref = -1; break; }
            if (p.beta[disc] == c.lo) { pref = 1; break; }
        }
        bool done = false;
        for (int sgn : {pref, -pref}) {
            auto scaled = [&, disc_c, sgn, kcounts](const Rat& e) {
                std::vector<DeltaConstraint> core = {
                    tr_con(p.r, kcounts, sgn > 0 ? e : Rat(-e), "tr period")};
                DeltaConstraint pinb{std::vector<Rat>(p.r, Rat(0)),
                                     std::vector<Rat>(p.r - 1, Rat(0)), Rat(0), "pin offender"};
                pinb.f[disc_c - 1] = 1;
                core.push_back(pinb);
                return core;
            };
            if (attempt({}, bpins, pres, scaled, base)) {
                done = true;
                break;
            }
        }
        if (done) {
            out.status = PerturbStatus::success;
            return out;
        }
    }
    out.status = PerturbStatus::verification_failed;
    if (out.detail.empty()) out.detail = "no reducible offender found";
    return out;
}

PerturbationOutcome clear_outside_connections(const ParamVector& p, const Rat& eps,
                                              const PerturbOptions& opt) {
    require_valid(p);
    if (!(eps > 0)) throw Error("validation", "eps must be positive");
    long bud = capped_budget(p, opt.budget_cap);
    StabilityReport before = stability_report(p, bud);
    PerturbationOutcome out;
    out.result = p;
    out.unstable_before = before.unstable_number;
    if (!before.attractor.finite_type) {
        out.status = PerturbStatus::verification_failed;
        out.detail = "input not finite type within budget";
        return out;
    }
    if (before.a3_pass) {
        out.unstable_after = before.unstable_number;
        out.verdict_after = before.verdict;
        out.distance = 0;
        out.status = PerturbStatus::success;
        return out;
    }
    const IntervalSet& X = before.attractor.X;
    // Connection survey: offsets for out-of-X landings onto out-of-X targets,
    // preservation for everything else.
    struct Offset { int src; Side side; long time; int dst; };
    std::vector<Offset> offsets;
    std::vector<DeltaConstraint> keep_periodic, keep_landing;
    std::vector<DeltaRequest::Claim> periodic_claims, landing_claims;
    for (int i = 1; i <= p.r - 1; ++i) {
        for (Side s : {Side::plus, Side::minus}) {
            SignedPoint pt{p.beta[i], s};
            OrbitRecord rec = orbit_record(p, pt, 2 * bud);
            if (!rec.period) continue;
            if (X.contains(pt) && rec.periodic_from_start()) {
                EntryCounts k = entry_counts_and_translation(p, pt, *rec.period);
                keep_periodic.push_back(conn_con(p.r, i, k.counts, i, Rat(0),
                                                 "closure b" + std::to_string(i) + side_char(s)));
                periodic_claims.push_back({i, s, *rec.period, i, Rat(0)});
                continue;
            }
            auto fl = rec.first_proper_landing();
            if (!fl) continue;
            bool src_in = X.contains(pt);
            bool dst_in = X.contains({p.beta[fl->disc], s});
            if (!src_in && !dst_in) {
                offsets.push_back({i, s, fl->time, fl->disc});
            } else {
                EntryCounts k = entry_counts_and_translation(p, pt, fl->time);
                keep_landing.push_back(conn_con(p.r, i, k.counts, fl->disc, Rat(0),
                                                "landing b" + std::to_string(i) + side_char(s)));
                landing_claims.push_back({i, s, fl->time, fl->disc, Rat(0)});
            }
        }
    }
    if (offsets.empty()) {
        out.status = PerturbStatus::infeasible;
        out.detail = "ghost cycle without an out-of-X connection to offset";
        return out;
    }
    std::string last_detail = "no admissible offset";
    StageTimer timer(opt.time_budget_ms);
    for (int k = 0; k < opt.max_retries; ++k) {
        Rat e = eps;
        for (int h = 0; h <= k; ++h) e /= 2;
        for (int tier = 0; tier < 2; ++tier) {
            if (timer.expired()) {
                last_detail = "time budget exhausted";
                break;
            }
            DeltaRequest req;
            req.eps = e;
            for (const auto& o : offsets) {
                EntryCounts kc = entry_counts_and_translation(p, {p.beta[o.src], o.side}, o.time);
                req.constraints.push_back(conn_con(p.r, o.src, kc.counts, o.dst,
                                                   o.side == Side::plus ? e : Rat(-e),
                                                   "offset b" + std::to_string(o.src)));
            }
            req.constraints.insert(req.constraints.end(), keep_periodic.begin(),
                                   keep_periodic.end());
            req.claims = periodic_claims;
            if (tier == 0) {
                req.constraints.insert(req.constraints.end(), keep_landing.begin(),
                                       keep_landing.end());
                req.claims.insert(req.claims.end(), landing_claims.begin(),
                                  landing_claims.end());
            }
            PerturbationOutcome step = realize_deltas(p, req);
            if (step.status == PerturbStatus::infeasible) {
                last_detail = step.detail;
                continue;
            }
            if (!step.ok()) {
                last_detail = step.detail;
                continue;
            }
            long bud2 = capped_budget(step.result, opt.budget_cap);
            StabilityReport after = stability_report(step.result, bud2);
            if (!after.attractor.finite_type || !after.a3_pass ||
                after.a1 != before.a1 || after.a2 != before.a2 ||
                after.matching != before.matching ||
                after.unstable_number != before.unstable_number) {
                last_detail = "post-state changed beyond the ghost connections";
                continue;
            }
            out = step;
            out.unstable_before = before.unstable_number;
            out.unstable_after = after.unstable_number;
            out.verdict_after = after.verdict;
            out.distance = param_distance(p, step.result);
            return out;
        }
    }
    out.status = PerturbStatus::verification_failed;
    out.detail = last_detail;
    return out;
}

PerturbationOutcome perturb_to_stable(const ParamVector& p, const Rat& eps, int max_rounds,
                                      const PerturbOptions& opt, PipelineTrail* trail) {
    require_valid(p);
    if (!(eps > 0)) throw Error("validation", "eps must be positive");
    PerturbationOutcome out;
    out.result = p;
    ParamVector cur = p;
    auto log_stage = [&](const std::string& name, const PerturbationOutcome& s) {
        if (!trail) return;
        trail->stages.push_back(
            {name, s.status, s.unstable_before, s.unstable_after, s.distance, s.detail});
    };
    for (int round = 0; round <= max_rounds; ++round) {
        long bud = capped_budget(cur, opt.budget_cap);
        StabilityReport rep = stability_report(cur, bud);
        if (rep.verdict == Verdict::stable) {
            out.result = cur;
            out.status = PerturbStatus::success;
            out.unstable_after = rep.unstable_number;
            out.verdict_after = rep.verdict;
            out.correspondence_after =
                correspondence_report(cur, rep.attractor.X, 2 * bud).all_hold();
            out.rounds = round;
            out.distance = param_distance(p, cur);
            for (int s = 0; s < p.r; ++s) out.dgamma.push_back(cur.gamma[s] - p.gamma[s]);
            for (int i = 1; i <= p.r - 1; ++i) out.dbeta.push_back(cur.beta[i] - p.beta[i]);
            return out;
        }
        if (!rep.attractor.finite_type) {
            out.status = PerturbStatus::verification_failed;
            out.detail = "pipeline-stalled: attractor did not stabilize within budget";
            out.result = cur;
            return out;
        }
        if (round == max_rounds) break;
        Rat stage_eps = eps;
        for (int h = 0; h <= round; ++h) stage_eps /= 2;
        bool corr_ok = correspondence_report(cur, rep.attractor.X, 2 * bud).all_hold();
        std::string stage;
        PerturbationOutcome step;
        if (!corr_ok) {
            stage = "correspondence";
            step = perturb_to_correspondence(cur, stage_eps, opt);
        } else if (rep.unstable_number > 0) {
            stage = "reduce-unstable";
            step = reduce_unstable_number(cur, stage_eps, opt);
        } else if (!rep.a3_pass) {
            stage = "clear-outside";
            step = clear_outside_connections(cur, stage_eps, opt);
        } else {
            out.status = PerturbStatus::verification_failed;
            out.detail = "pipeline-stalled: conditions hold but the map is not stable";
            out.result = cur;
            return out;
        }
        log_stage(stage, step);
        if (!step.ok()) {
            out.status = step.status;
            out.detail = "pipeline-stalled: " + stage +
                         (step.detail.empty() ? "" : ": " + step.detail);
            out.result = cur;
            return out;
        }
        cur = step.result;
    }
    out.status = PerturbStatus::verification_failed;
    out.detail = "pipeline-stalled: round limit reached";
    out.result = cur;
    return out;
}

}  // namespace itm
