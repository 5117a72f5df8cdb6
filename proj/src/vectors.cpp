#include "itm/vectors.hpp"

#include <algorithm>
#include <sstream>

namespace itm {

bool CoefVector::is_zero() const {
    for (const auto& x : e)
        if (x != 0) return false;
    for (const auto& x : f)
        if (x != 0) return false;
    return true;
}

CoefVector operator+(const CoefVector& a, const CoefVector& b) {
    CoefVector out = a;
    for (size_t i = 0; i < out.e.size(); ++i) out.e[i] += b.e[i];
    for (size_t i = 0; i < out.f.size(); ++i) out.f[i] += b.f[i];
    return out;
}

CoefVector operator-(const CoefVector& a, const CoefVector& b) {
    CoefVector out = a;
    for (size_t i = 0; i < out.e.size(); ++i) out.e[i] -= b.e[i];
    for (size_t i = 0; i < out.f.size(); ++i) out.f[i] -= b.f[i];
    return out;
}

CoefVector operator-(const CoefVector& a) {
    CoefVector out = a;
    for (auto& x : out.e) x = -x;
    for (auto& x : out.f) x = -x;
    return out;
}

Rat product(const CoefVector& v, const ParamVector& p) {
    Rat out = 0;
    for (size_t s = 0; s < v.e.size(); ++s) out += Rat(v.e[s]) * p.gamma[s];
    for (size_t s = 0; s < v.f.size(); ++s) out += Rat(v.f[s]) * p.beta[s + 1];
    return out;
}

std::string to_string(const CoefVector& v) {
    std::ostringstream os;
    os << '(';
    for (size_t s = 0; s < v.e.size(); ++s) os << (s ? "," : "") << v.e[s];
    os << " | ";
    for (size_t s = 0; s < v.f.size(); ++s) os << (s ? "," : "") << v.f[s];
    os << ')';
    return os.str();
}

namespace {

std::vector<Int> counts_of(const ParamVector& p, const SignedPoint& x, long n) {
    EntryCounts ec = entry_counts_and_translation(p, x, n);
    std::vector<Int> out;
    for (long c : ec.counts) out.push_back(c);
    return out;
}

SideVectors side_vectors(const ParamVector& p, const ReturnMapData& d, int j, Side s) {
    const Chain& ch = d.chain(j, s);
    SideVectors sv;
    if (ch.hits.empty()) {
        sv.landing_form = false;
        sv.ret = CoefVector(p.r);
        sv.ret.e = counts_of(p, ch.start, ch.return_time);
        return sv;
    }
    for (size_t k = 1; k < ch.hits.size(); ++k) {
        const auto& prev = ch.hits[k - 1];
        const auto& next = ch.hits[k];
        CoefVector c(p.r);
        c.e = counts_of(p, {p.beta[prev.disc], s}, next.time - prev.time);
        c.f[prev.disc - 1] += 1;
        c.f[next.disc - 1] -= 1;
        sv.connections.push_back(std::move(c));
    }
    const auto& last = ch.hits.back();
    sv.ret = CoefVector(p.r);
    sv.ret.e = counts_of(p, {p.beta[last.disc], s}, ch.return_time - last.time);
    sv.ret.f[last.disc - 1] += 1;
    return sv;
}

}  // namespace

ComponentVectorBundle build_bundle(const ParamVector& p, const ReturnMapData& d) {
    ComponentVectorBundle b;
    b.r = p.r;
    b.N = d.N;
    b.a = d.a;
    b.L.resize(d.N + 1);
    b.plus.resize(d.N);
    b.minus.resize(d.N + 1);
    for (int j = 0; j <= d.N - 1; ++j) b.plus[j] = side_vectors(p, d, j, Side::plus);
    for (int j = 1; j <= d.N; ++j) b.minus[j] = side_vectors(p, d, j, Side::minus);
    for (int j = 0; j <= d.N; ++j) {
        Side s = (j == d.N) ? Side::minus : Side::plus;
        const Chain& ch = d.chain(j, s);
        if (ch.hits.empty()) continue;
        CoefVector L(p.r);
        L.e = counts_of(p, ch.start, ch.hits.front().time);
        L.f[ch.hits.front().disc - 1] -= 1;
        b.L[j] = std::move(L);
    }
    return b;
}

IdentityCheck verify_identities(const ParamVector& p, const ReturnMapData& d,
                                const ComponentVectorBundle& b) {
    IdentityCheck out;
    auto fail = [&](const std::string& what) { out.failures.push_back(what); };
    auto r_value = [&](int j, Side s) -> Rat {
        // image of the one-sided point a_j^s under the return map
        int br = (s == Side::plus) ? j + 1 : j;
        return d.a[j] + d.branches[br - 1].translation;
    };
    for (int j = 0; j <= b.N; ++j) {
        if (!b.L[j]) continue;
        if (product(*b.L[j], p) + b.a[j] != 0) fail("L[" + std::to_string(j) + "]");
    }
    auto check_side = [&](int j, Side s) {
        const SideVectors& sv = (s == Side::plus) ? b.plus[j] : b.minus[j];
        char sc = side_char(s);
        for (size_t k = 0; k < sv.connections.size(); ++k) {
            if (product(sv.connections[k], p) != 0)
                fail(std::string("C") + sc + "(" + std::to_string(j) + "," +
                     std::to_string(k + 1) + ")");
        }
        Rat expect = sv.landing_form ? r_value(j, s) : Rat(r_value(j, s) - b.a[j]);
        if (product(sv.ret, p) != expect)
            fail(std::string("R") + sc + "[" + std::to_string(j) + "]");
    };
    for (int j = 0; j <= b.N - 1; ++j) check_side(j, Side::plus);
    for (int j = 1; j <= b.N; ++j) check_side(j, Side::minus);
    return out;
}

int exact_rank(const std::vector<CoefVector>& rows) {
    if (rows.empty()) return 0;
    size_t cols = rows[0].e.size() + rows[0].f.size();
    std::vector<std::vector<Int>> m;
    for (const auto& v : rows) {
        std::vector<Int> row = v.e;
        row.insert(row.end(), v.f.begin(), v.f.end());
        m.push_back(std::move(row));
    }
    // Bareiss fraction-free elimination
    int rank = 0;
    Int prev = 1;
    for (size_t c = 0; c < cols && rank < (int)m.size(); ++c) {
        size_t piv = rank;
        while (piv < m.size() && m[piv][c] == 0) ++piv;
        if (piv == m.size()) continue;
        std::swap(m[rank], m[piv]);
        for (size_t i = rank + 1; i < m.size(); ++i) {
            for (size_t k = c + 1; k < cols; ++k)
                m[i][k] = (m[i][k] * m[rank][c] - m[i][c] * m[rank][k]) / prev;
            m[i][c] = 0;
        }
        prev = m[rank][c];
        ++rank;
    }
    return rank;
}

IndependenceWitnesses independence_witnesses(const ParamVector& p, const ReturnMapData& d) {
    if (d.N < 3) throw Error("n-too-small", "component has N < 3");
    ComponentVectorBundle b = build_bundle(p, d);
    // return vector of a_j^- with the boundary substitution folded in
    auto rm = [&](int j) -> CoefVector {
        if (j == d.N && !d.aN_lands) return b.minus[d.N].ret + b.minus[d.tau[d.N]].ret;
        return b.minus[j].ret;
    };
    auto rp = [&](int j) -> CoefVector {
        if (j == 0 && !d.a0_lands) return b.plus[0].ret + b.plus[d.tau[1] - 1].ret;
        return b.plus[j].ret;
    };
    std::vector<int> drop;
    if (!d.a0_lands && d.sigma[1] != 1) drop.push_back(d.sigma[1] - 1);
    if (!d.aN_lands && d.sigma[d.N] != d.N) drop.push_back(d.sigma[d.N]);
    IndependenceWitnesses out;
    for (int j = 1; j <= d.N - 1; ++j) {
        if (!drop.empty() && j == drop.front()) continue;  // drop at most one row
        out.vectors.push_back(rm(d.tau[j]) - rp(d.tau[j + 1] - 1));
    }
    out.rank = exact_rank(out.vectors);
    return out;
}

std::optional<CoefVector> measure_zero_witness(const ParamVector& p,
                                               const StabilityReport& rep,
                                               bool want_periodic) {
    long budget = 2 * rep.attractor.budget;
    // a critical connection: some signed critical lands on a discontinuity
    for (const SignedPoint& c : critical_set(p)) {
        OrbitRecord rec = orbit_record(p, c, budget);
        auto l = rec.first_proper_landing();
        if (!l) continue;
        int from = *discontinuity_index(p, c.value);
        CoefVector v(p.r);
        v.e = counts_of(p, c, l->time);
        v.f[from - 1] += 1;
        v.f[l->disc - 1] -= 1;
        return v;
    }
    for (const auto& comp : rep.components)
        if (comp.rm.N >= 3) return independence_witnesses(p, comp.rm).vectors.front();
    if (want_periodic) {
        for (const SignedPoint& c : critical_set(p)) {
            OrbitRecord rec = orbit_record(p, c, budget);
            if (!rec.period) continue;
            CoefVector v(p.r);
            v.e = counts_of(p, rec.points[rec.preperiod], *rec.period);
            return v;
        }
    }
    return std::nullopt;
}

DependenceCoefficients zero_coefficients(const ComponentVectorBundle& b) {
    DependenceCoefficients c;
    c.L.assign(b.N + 1, Rat(0));
    c.ret_plus.assign(b.N, Rat(0));
    c.ret_minus.assign(b.N + 1, Rat(0));
    c.conn_plus.resize(b.N);
    c.conn_minus.resize(b.N + 1);
    for (int j = 0; j <= b.N - 1; ++j)
        c.conn_plus[j].assign(b.plus[j].connections.size(), Rat(0));
    for (int j = 1; j <= b.N; ++j)
        c.conn_minus[j].assign(b.minus[j].connections.size(), Rat(0));
    return c;
}

LinDepVerdict lin_dep_coefficient_check(const ComponentVectorBundle& b,
                                        const DependenceCoefficients& c) {
    LinDepVerdict out;
    size_t cols = b.r + (b.r - 1);
    std::vector<Rat> sum(cols, Rat(0));
    auto add = [&](const Rat& w, const CoefVector& v) {
        for (int s = 0; s < b.r; ++s) sum[s] += w * Rat(v.e[s]);
        for (int s = 0; s < b.r - 1; ++s) sum[b.r + s] += w * Rat(v.f[s]);
    };
    for (int j = 0; j <= b.N; ++j) {
        if (b.L[j]) {
            add(c.L[j], *b.L[j]);
        } else if (c.L[j] != 0) {
            out.violations.push_back("coefficient on missing L[" + std::to_string(j) + "]");
        }
    }
    for (int j = 0; j <= b.N - 1; ++j) {
        for (size_t k = 0; k < b.plus[j].connections.size(); ++k)
            add(c.conn_plus[j][k], b.plus[j].connections[k]);
        add(c.ret_plus[j], b.plus[j].ret);
    }
    for (int j = 1; j <= b.N; ++j) {
        for (size_t k = 0; k < b.minus[j].connections.size(); ++k)
            add(c.conn_minus[j][k], b.minus[j].connections[k]);
        add(c.ret_minus[j], b.minus[j].ret);
    }
    for (const Rat& x : sum)
        if (x != 0) return out;  // is_dependence stays false
    out.is_dependence = true;

    // the equality chain along each image adjacency j / j+1
    for (int j = 0; j <= b.N - 1; ++j) {
        std::vector<Rat> vals;
        for (size_t k = 0; k < b.plus[j].connections.size(); ++k)
            vals.push_back(c.conn_plus[j][k]);
        vals.push_back(c.ret_plus[j]);
        for (size_t k = 0; k < b.minus[j + 1].connections.size(); ++k)
            vals.push_back(-c.conn_minus[j + 1][k]);
        vals.push_back(-c.ret_minus[j + 1]);
        for (const Rat& v : vals)
            if (v != vals.front()) {
                out.violations.push_back("equality chain broken at j=" + std::to_string(j));
                break;
            }
    }
    auto side_first = [&](int j, Side s) -> Rat {
        if (s == Side::plus)
            return b.plus[j].connections.empty() ? c.ret_plus[j] : c.conn_plus[j][0];
        return b.minus[j].connections.empty() ? c.ret_minus[j] : c.conn_minus[j][0];
    };
    for (int j = 1; j <= b.N - 1; ++j)
        if (c.L[j] != side_first(j, Side::minus) + side_first(j, Side::plus))
            out.violations.push_back("alpha_" + std::to_string(j) +
                                     " != alpha-(j,1) + alpha+(j,1)");
    return out;
}

}  // namespace itm
