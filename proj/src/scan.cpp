#include "itm/scan.hpp"

#include "itm/attractor.hpp"

#include <atomic>
#include <sstream>
#include <thread>

namespace itm {

void validate_scan_spec(const ScanSpec& spec) {
    require_valid(spec.base);
    for (const ScanAxis* ax : {&spec.x, &spec.y}) {
        if (ax->cells < 1) throw Error("validation", "axis resolution must be >= 1");
        if (!(ax->lo <= ax->hi)) throw Error("validation", "axis range is empty");
        if (ax->kind == ScanAxis::Kind::gamma) {
            if (ax->index < 0 || ax->index >= spec.base.r)
                throw Error("validation", "gamma axis index out of range");
        } else {
            if (ax->index < 1 || ax->index > spec.base.r - 1)
                throw Error("validation", "beta axis index out of range");
        }
    }
    if (spec.budget_cap < 1) throw Error("validation", "budget cap must be >= 1");
}

namespace {

Rat axis_value(const ScanAxis& ax, int k) {
    if (ax.cells == 1) return ax.lo;
    return ax.lo + (ax.hi - ax.lo) * Rat(k, ax.cells - 1);
}

void set_axis(ParamVector& p, const ScanAxis& ax, const Rat& v) {
    if (ax.kind == ScanAxis::Kind::gamma)
        p.gamma[ax.index] = v;
    else
        p.beta[ax.index] = v;
}

ScanCell eval_cell(const ScanSpec& spec, int i, int j) {
    ScanCell cell;
    cell.i = i;
    cell.j = j;
    cell.params = spec.base;
    set_axis(cell.params, spec.x, axis_value(spec.x, i));
    set_axis(cell.params, spec.y, axis_value(spec.y, j));
    if (!validate_itm(cell.params).empty()) {
        cell.status = "infeasible";
        return cell;
    }
    long bud;
    try {
        bud = stabilization_budget(cell.params, spec.budget_cap);
    } catch (const Error&) {
        bud = spec.budget_cap;
    }
    AttractorResult att = compute_attractor(cell.params, bud);
    if (!att.finite_type) {
        cell.status = "undecided";
        cell.n_star = att.budget;
        return cell;
    }
    cell.status = "finite";
    cell.n_star = att.n_star;
    if (spec.depth == ScanDepth::full_stability) {
        try {
            cell.verdict = stability_report(cell.params, bud).verdict;
        } catch (const Error&) {
            cell.verdict = Verdict::undecided;
        }
    }
    return cell;
}

}  // namespace

ScanResult run_scan(const ScanSpec& spec, int workers) {
    validate_scan_spec(spec);
    if (workers < 1) workers = 1;
    const int nx = spec.x.cells, ny = spec.y.cells;
    const int total = nx * ny;
    ScanResult res;
    res.spec = spec;
    res.cells.resize(total);
    std::atomic<int> next{0};
    auto work = [&]() {
        for (int idx = next++; idx < total; idx = next++)
            res.cells[idx] = eval_cell(spec, idx % nx, idx / nx);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return res;
}

std::string scan_csv(const ScanResult& res) {
    std::ostringstream out;
    out << "i,j,beta,gamma,status,n_star,verdict\n";
    for (const auto& c : res.cells) {
        out << c.i << "," << c.j << ",";
        for (int k = 1; k <= c.params.r - 1; ++k)
            out << (k > 1 ? " " : "") << rat_str(c.params.beta[k]);
        out << ",";
        for (int k = 0; k < c.params.r; ++k)
            out << (k > 0 ? " " : "") << rat_str(c.params.gamma[k]);
        out << "," << c.status << "," << c.n_star << ",";
        if (c.status == "finite" && res.spec.depth == ScanDepth::full_stability)
            out << to_string(c.verdict);
        out << "\n";
    }
    return out.str();
}

std::string scan_ppm(const ScanResult& res) {
    const int nx = res.spec.x.cells, ny = res.spec.y.cells;
    std::ostringstream out;
    out << "P3\n";
    out << "# palette: infeasible 160 40 40; undecided 130 130 130; finite 70 110 200; "
           "stable 50 170 90; finite-unstable 230 180 60\n";
    out << nx << " " << ny << "\n255\n";
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const ScanCell& c = res.cells[j * nx + i];
            const char* rgb = "130 130 130";
            if (c.status == "infeasible")
                rgb = "160 40 40";
            else if (c.status == "finite") {
                if (res.spec.depth == ScanDepth::full_stability)
                    rgb = c.verdict == Verdict::stable      ? "50 170 90"
                          : c.verdict == Verdict::unstable ? "230 180 60"
                                                            : "130 130 130";
                else
                    rgb = "70 110 200";
            }
            out << rgb << (i + 1 == nx ? "" : "  ");
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace itm
