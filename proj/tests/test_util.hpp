#pragma once

#include "itm/attractor.hpp"

#include <algorithm>
#include <random>

namespace itm::testing {

// r=2 rotation-like fixture: attractor [0, 3/4), stable.
inline ParamVector m2() {
    ParamVector p;
    p.r = 2;
    p.beta = {Rat(0), Rat(1, 2), Rat(1)};
    p.gamma = {Rat(1, 4), Rat(-1, 2)};
    return p;
}

// r=3 fixture: attractor [1/3, 2/3), both discontinuities on its boundary,
// ghost cycle through 1/3^- and 2/3^+, unstable.
inline ParamVector m3() {
    ParamVector p;
    p.r = 3;
    p.beta = {Rat(0), Rat(1, 3), Rat(2, 3), Rat(1)};
    p.gamma = {Rat(1, 3), Rat(0), Rat(-2, 3)};
    return p;
}

inline ParamVector identity_map(int r = 2) {
    ParamVector p;
    p.r = r;
    for (int i = 0; i <= r; ++i) p.beta.push_back(Rat(i, r));
    p.gamma.assign(r, Rat(0));
    return p;
}

// Random valid map with all parameters on a single 1/q grid, q <= max_den.
inline ParamVector random_map(std::mt19937& rng, int r, int max_den) {
    for (;;) {
        int q = std::uniform_int_distribution<int>(r, max_den)(rng);
        // distinct interior cut numerators in 1..q-1
        std::vector<int> nums;
        for (int k = 1; k < q; ++k) nums.push_back(k);
        std::shuffle(nums.begin(), nums.end(), rng);
        if ((int)nums.size() < r - 1) continue;
        nums.resize(r - 1);
        std::sort(nums.begin(), nums.end());
        ParamVector p;
        p.r = r;
        p.beta.push_back(Rat(0));
        for (int n : nums) p.beta.push_back(Rat(n, q));
        p.beta.push_back(Rat(1));
        for (int i = 1; i <= r; ++i) {
            // gamma_i in [-beta_{i-1}, 1-beta_i], numerators over q
            long l = -(long)rat_num(p.beta[i - 1] * q);
            long h = q - (long)rat_num(p.beta[i] * q);
            long n = std::uniform_int_distribution<long>(l, h)(rng);
            p.gamma.push_back(Rat(n, q));
        }
        if (validate_itm(p).empty()) return p;
    }
}

// Independent attractor computation on the 1/D grid: cell c covers
// [c/D, (c+1)/D) and shifts whole under one branch since every beta is a
// grid point.
inline IntervalSet grid_attractor(const ParamVector& p, long budget) {
    long D = (long)denominator_lcm(p);
    std::vector<int> branch_of(D);
    for (long c = 0, i = 1; c < D; ++c) {
        while (Rat(c, D) >= p.beta[i]) ++i;
        branch_of[c] = (int)i;
    }
    std::vector<long> shift(D);
    for (long c = 0; c < D; ++c) {
        Rat s = p.gamma_of(branch_of[c]) * D;
        shift[c] = (long)rat_num(s);
    }
    std::vector<char> cur(D, 1), next;
    for (long n = 0; n < budget; ++n) {
        next.assign(D, 0);
        for (long c = 0; c < D; ++c)
            if (cur[c]) next[c + shift[c]] = 1;
        if (next == cur) break;
        cur = next;
    }
    std::vector<Interval> ivs;
    for (long c = 0; c < D; ++c)
        if (cur[c]) ivs.push_back({Rat(c, D), Rat(c + 1, D)});
    return IntervalSet(std::move(ivs));
}

}  // namespace itm::testing
