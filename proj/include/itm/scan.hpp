#pragma once

#include "itm/stability.hpp"

#include <string>

namespace itm {

// One scan axis: replaces gamma[index] (kind gamma, 0-based) or the interior
// discontinuity beta[index] (kind beta, 1-based) with values sampled evenly
// in [lo, hi] (endpoints included; a single-cell axis stays at lo).
struct ScanAxis {
    enum class Kind { gamma, beta } kind = Kind::gamma;
    int index = 0;
    Rat lo, hi;
    int cells = 1;
};

enum class ScanDepth { type_only, full_stability };

struct ScanSpec {
    ParamVector base;
    ScanAxis x, y;        // x varies along columns (i), y along rows (j)
    ScanDepth depth = ScanDepth::type_only;
    long budget_cap = 200'000;  // per-cell attractor budget ceiling
};

void validate_scan_spec(const ScanSpec& spec);

// Per-cell outcome. status: "infeasible" (polytope violated), "finite",
// "undecided" (budget exhausted before stabilization).
struct ScanCell {
    int i = 0, j = 0;
    ParamVector params;
    std::string status;
    long n_star = -1;   // stabilization step for finite cells, else the budget spent
    Verdict verdict = Verdict::undecided;  // full_stability depth only
};

struct ScanResult {
    ScanSpec spec;
    std::vector<ScanCell> cells;  // row-major: j * x.cells + i
};

// Evaluates every cell; `workers` threads split the grid, results are
// gathered in grid order so the output never depends on scheduling.
ScanResult run_scan(const ScanSpec& spec, int workers = 1);

// CSV: header "i,j,beta,gamma,status,n_star,verdict"; beta/gamma are
// space-joined rational strings.
std::string scan_csv(const ScanResult& res);

// Plain P3 portable pixmap, one pixel per cell. Palette (documented in the
// image header comment): infeasible 160 40 40, undecided 130 130 130,
// finite 70 110 200, stable 50 170 90, finite-but-unstable 230 180 60.
std::string scan_ppm(const ScanResult& res);

}  // namespace itm
