#pragma once

#include "itm/rat.hpp"

#include <optional>
#include <vector>

namespace itm {

// One-sided points. (v, minus) stands for the left limit at v, (v, plus) for
// the right limit. (0, minus) and (1, plus) are outside the domain; (0, plus)
// and (1, minus) are the usual endpoint sentinels.
enum class Side { minus, plus };

inline char side_char(Side s) { return s == Side::plus ? '+' : '-'; }
inline Side opposite(Side s) { return s == Side::plus ? Side::minus : Side::plus; }

struct SignedPoint {
    Rat value;
    Side side = Side::plus;

    bool operator==(const SignedPoint& o) const { return side == o.side && value == o.value; }
    // Order: x^- < x^+ at equal value.
    bool operator<(const SignedPoint& o) const {
        if (value != o.value) return value < o.value;
        return side == Side::minus && o.side == Side::plus;
    }
};

std::string to_string(const SignedPoint& p);

struct SignedPointHash {
    size_t operator()(const SignedPoint& p) const {
        size_t h = RatHash{}(p.value);
        boost::hash_combine(h, p.side == Side::plus);
        return h;
    }
};

// A piecewise translation of [0,1) on r half-open branches.
// beta has r+1 entries (beta[0]=0, beta[r]=1), gamma has r entries;
// branch i (1-based) is [beta[i-1], beta[i]) with translation gamma[i-1].
struct ParamVector {
    int r = 0;
    std::vector<Rat> beta;
    std::vector<Rat> gamma;

    const Rat& gamma_of(int branch) const { return gamma[branch - 1]; }
    bool operator==(const ParamVector& o) const {
        return r == o.r && beta == o.beta && gamma == o.gamma;
    }
};

struct Violation {
    std::string constraint;
    int index = 0;
};

// Empty result means the map is a valid element of ITM(r).
std::vector<Violation> validate_itm(const ParamVector& p);

void require_valid(const ParamVector& p);

// 1-based branch containing x: plus side takes beta[i-1] <= v < beta[i],
// minus side takes beta[i-1] < v <= beta[i]. Throws on the out-of-domain
// sentinels (0,minus) and (1,plus).
int branch_index(const ParamVector& p, const SignedPoint& x);

SignedPoint apply(const ParamVector& p, const SignedPoint& x);

// If v equals an interior discontinuity beta_i, returns i.
std::optional<int> discontinuity_index(const ParamVector& p, const Rat& v);

// The 2(r-1) signed critical points beta_1^-, beta_1^+, ..., beta_{r-1}^+.
std::vector<SignedPoint> critical_set(const ParamVector& p);

struct Landing {
    long time;
    int disc;  // discontinuity index in 1..r-1
    Side side;
};

struct OrbitRecord {
    SignedPoint start;
    long preperiod = 0;
    std::optional<long> period;       // absent: budget exhausted
    std::vector<SignedPoint> points;  // points[0..preperiod+period], last repeats points[preperiod]
    std::vector<int> branches;        // branch applied at each recorded step
    std::vector<Landing> landings;    // times < preperiod+period, in time order

    bool periodic_from_start() const { return period.has_value() && preperiod == 0; }
    // First landing strictly after time 0, if any.
    std::optional<Landing> first_proper_landing() const;
};

OrbitRecord orbit_record(const ParamVector& p, const SignedPoint& x, long budget);

struct EntryCounts {
    std::vector<long> counts;  // counts[s-1] = k_s(x,n)
    Rat tr;                    // = T^n(x) - x = sum k_s gamma_s
};

EntryCounts entry_counts_and_translation(const ParamVector& p, const SignedPoint& x, long n);

// lcm of all beta/gamma denominators; every orbit value of a point on the
// 1/D grid stays on that grid.
Int denominator_lcm(const ParamVector& p);

}  // namespace itm
