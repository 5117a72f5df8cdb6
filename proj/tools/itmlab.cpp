// itmlab: exact-arithmetic analysis of interval translation maps.
//
// Commands:
//   analyze <map.json>          full stability analysis; exit 0 stable,
//                               1 unstable, 2 undecided
//   scan <spec.json>            parameter-space scan to CSV + PPM
//   perturb <map.json>          stabilization pipeline; exit 0 on a
//                               verified-stable output, 3 when stalled
//   vectors <map.json>          component vector bundle + identity checks
//
// All rationals in files are exact strings ("2/3"); exit 64 on parse errors.

#include "itm/json_io.hpp"
#include "itm/scan.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace itm;

namespace {

constexpr int kExitStable = 0;
constexpr int kExitUnstable = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitStalled = 3;
constexpr int kExitParse = 64;

struct CommonFlags {
    long budget = 2'000'000;
    std::string format = "json";
};

long analysis_budget(const ParamVector& p, long cap) {
    try {
        return stabilization_budget(p, cap);
    } catch (const Error&) {
        return cap;
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open " + path + " for writing");
    out << text;
}

std::string text_report(const StabilityReport& rep, const ParamVector& p) {
    std::ostringstream out;
    out << "finite type: " << (rep.attractor.finite_type ? "yes" : "no") << "\n";
    if (rep.attractor.finite_type) {
        out << "n*: " << rep.attractor.n_star << "\nX:";
        for (const auto& iv : rep.attractor.X.intervals())
            out << " [" << rat_str(iv.lo) << "," << rat_str(iv.hi) << ")";
        out << "\ncomponents: " << rep.comps.components.size() << "\n";
        out << "unstable number: " << rep.unstable_number << "\n";
        out << "a1: " << rep.a1 << "  a2: " << rep.a2 << "  a3: " << rep.a3_pass
            << "  matching: " << rep.matching << "\n";
        if (!rep.a3.violations.empty()) {
            out << "ghost cycle through:";
            for (const auto& v : rep.a3.violations) {
                if (auto d = discontinuity_index(p, v.value))
                    out << " b" << *d << side_char(v.side);
                else
                    out << " " << rat_str(v.value) << side_char(v.side);
            }
            out << "\n";
        }
    }
    out << "verdict: " << to_string(rep.verdict) << "\n";
    return out.str();
}

int cmd_analyze(const std::string& input, const CommonFlags& flags, const std::string& output) {
    ParamVector p = load_map_file(input);
    long bud = analysis_budget(p, flags.budget);
    StabilityReport rep = stability_report(p, bud);
    if (flags.format == "json") {
        json j = to_json(rep, p);
        j["map"] = map_to_json(p);
        j["correspondence"] = rep.attractor.finite_type
                                  ? to_json(correspondence_report(p, rep.attractor.X, 2 * bud))
                                  : json(nullptr);
        write_output(output, j.dump(2) + "\n");
    } else {
        write_output(output, text_report(rep, p));
    }
    switch (rep.verdict) {
        case Verdict::stable: return kExitStable;
        case Verdict::unstable: return kExitUnstable;
        case Verdict::undecided: return kExitUndecided;
    }
    return kExitUndecided;
}

ScanAxis axis_from_json(const json& j, const char* name) {
    if (!j.is_object()) throw Error("parse", std::string(name) + ": expected an object");
    ScanAxis ax;
    std::string kind = j.value("kind", "");
    if (kind == "gamma")
        ax.kind = ScanAxis::Kind::gamma;
    else if (kind == "beta")
        ax.kind = ScanAxis::Kind::beta;
    else
        throw Error("parse", std::string(name) + ".kind: expected gamma or beta");
    ax.index = j.value("index", -1);
    if (!j.contains("lo") || !j.contains("hi"))
        throw Error("parse", std::string(name) + ": missing lo/hi");
    ax.lo = parse_rat(j["lo"].get<std::string>());
    ax.hi = parse_rat(j["hi"].get<std::string>());
    ax.cells = j.value("cells", 1);
    return ax;
}

int cmd_scan(const std::string& input, const CommonFlags& flags, int workers,
             const std::string& csv_path, const std::string& ppm_path) {
    std::ifstream in(input);
    if (!in) throw Error("io", "cannot open " + input);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("parse", input + ": " + e.what());
    }
    ScanSpec spec;
    if (!j.contains("base")) throw Error("parse", "missing field: base");
    spec.base = map_from_json(j["base"]);
    spec.x = axis_from_json(j.contains("x") ? j["x"] : json(), "x");
    spec.y = axis_from_json(j.contains("y") ? j["y"] : json(), "y");
    std::string depth = j.value("depth", "type-only");
    if (depth == "type-only")
        spec.depth = ScanDepth::type_only;
    else if (depth == "full-stability")
        spec.depth = ScanDepth::full_stability;
    else
        throw Error("parse", "depth: expected type-only or full-stability");
    spec.budget_cap = j.value("budget", (long)flags.budget);
    ScanResult res = run_scan(spec, workers);
    write_output(csv_path, scan_csv(res));
    write_output(ppm_path, scan_ppm(res));
    return 0;
}

int cmd_perturb(const std::string& input, const CommonFlags& flags, const Rat& eps,
                const Int& max_denom, int rounds, const std::string& output) {
    ParamVector p = load_map_file(input);
    if (!(eps > 0)) throw Error("validation", "eps must be positive");
    ParamVector q = rationalize(p, max_denom);
    PerturbOptions opt;
    opt.budget_cap = flags.budget;
    PipelineTrail trail;
    PerturbationOutcome out = perturb_to_stable(q, eps, rounds, opt, &trail);
    json j = to_json(out);
    j["trail"] = to_json(trail);
    j["input"] = map_to_json(p);
    write_output(output, j.dump(2) + "\n");
    if (out.ok()) return kExitStable;
    std::cerr << out.detail << "\n";
    return kExitStalled;
}

int cmd_vectors(const std::string& input, const CommonFlags& flags, int component,
                const std::string& output) {
    ParamVector p = load_map_file(input);
    long bud = analysis_budget(p, flags.budget);
    AttractorResult att = compute_attractor(p, bud);
    if (!att.finite_type) throw Error("not-finite-type", "attractor did not stabilize");
    ComponentsReport comps = components_and_boundary(p, att.X);
    if (component < 0 || component >= (int)comps.components.size())
        throw Error("component-out-of-range",
                    "map has " + std::to_string(comps.components.size()) + " component(s)");
    ReturnMapData d = compute_return_map(p, att.X, comps.components[component], 2 * bud);
    ComponentVectorBundle b = build_bundle(p, d);
    IdentityCheck chk = verify_identities(p, d, b);
    json j;
    j["bundle"] = to_json(b);
    j["identities_pass"] = chk.pass();
    j["identity_failures"] = chk.failures;
    if (d.N >= 3) {
        IndependenceWitnesses w = independence_witnesses(p, d);
        json vecs = json::array();
        for (const auto& v : w.vectors) vecs.push_back(to_json(v));
        j["witnesses"] = vecs;
        j["rank"] = w.rank;
    }
    write_output(output, j.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"itmlab: exact analysis of interval translation maps"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string input, output, csv_path = "scan.csv", ppm_path = "scan.ppm";
    int workers = 1, component = 0, rounds = 16;
    std::string eps_str = "1/64", max_denom_str;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--budget", flags.budget, "attractor budget ceiling");
        c->add_option("--format", flags.format, "json|text")
            ->check(CLI::IsMember({"json", "text"}));
    };

    CLI::App* analyze = app.add_subcommand("analyze", "full stability analysis of one map");
    analyze->add_option("input", input, "map file (JSON)")->required();
    analyze->add_option("-o,--output", output, "report file (default stdout)");
    add_common(analyze);

    CLI::App* scan = app.add_subcommand("scan", "grid scan over two parameter axes");
    scan->add_option("input", input, "scan spec file (JSON)")->required();
    scan->add_option("--csv", csv_path, "CSV output path");
    scan->add_option("--ppm", ppm_path, "pixmap output path");
    scan->add_option("--workers", workers, "worker thread count");
    add_common(scan);

    CLI::App* perturb = app.add_subcommand("perturb", "stabilize a map by small perturbations");
    perturb->add_option("input", input, "map file (JSON)")->required();
    perturb->add_option("-o,--output", output, "outcome report file (default stdout)");
    perturb->add_option("--eps", eps_str, "stage perturbation bound (rational)");
    perturb->add_option("--max-denominator", max_denom_str,
                        "rationalization cap (default env ITMLAB_MAX_DENOM or 1000000)");
    perturb->add_option("--rounds", rounds, "pipeline round limit");
    add_common(perturb);

    CLI::App* vectors = app.add_subcommand("vectors", "component vector bundle extraction");
    vectors->add_option("input", input, "map file (JSON)")->required();
    vectors->add_option("component", component, "component index");
    vectors->add_option("-o,--output", output, "report file (default stdout)");
    add_common(vectors);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) return cmd_analyze(input, flags, output);
        if (scan->parsed()) return cmd_scan(input, flags, workers, csv_path, ppm_path);
        if (perturb->parsed()) {
            Rat eps = parse_rat(eps_str);
            Int max_denom;
            if (!max_denom_str.empty()) {
                max_denom = Int(max_denom_str);
            } else if (const char* env = std::getenv("ITMLAB_MAX_DENOM")) {
                max_denom = Int(env);
            } else {
                max_denom = 1'000'000;
            }
            return cmd_perturb(input, flags, eps, max_denom, rounds, output);
        }
        if (vectors->parsed()) return cmd_vectors(input, flags, component, output);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::string code = e.code;
        if (code == "parse" || code == "io" || code == "validation") return kExitParse;
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitParse;
}
