#include "itm/json_io.hpp"

#include <fstream>

namespace itm {

namespace {

Rat parse_field(const json& j, const std::string& field) {
    if (!j.is_string())
        throw Error("parse", field + ": rationals must be strings, got " + j.dump());
    try {
        return parse_rat(j.get<std::string>());
    } catch (const Error& e) {
        throw Error("parse", field + ": " + e.what());
    }
}

std::string ghost_node(const ParamVector& p, const SignedPoint& x) {
    if (auto i = discontinuity_index(p, x.value))
        return "b" + std::to_string(*i) + side_char(x.side);
    return rat_str(x.value) + side_char(x.side);
}

}  // namespace

json map_to_json(const ParamVector& p) {
    json j;
    j["r"] = p.r;
    json beta = json::array(), gamma = json::array();
    for (int i = 1; i <= p.r - 1; ++i) beta.push_back(rat_str(p.beta[i]));
    for (int s = 0; s < p.r; ++s) gamma.push_back(rat_str(p.gamma[s]));
    j["beta"] = beta;
    j["gamma"] = gamma;
    return j;
}

ParamVector map_from_json(const json& j) {
    if (!j.is_object()) throw Error("parse", "map file must be a JSON object");
    for (const char* f : {"r", "beta", "gamma"})
        if (!j.contains(f)) throw Error("parse", std::string("missing field: ") + f);
    if (!j["r"].is_number_integer()) throw Error("parse", "r: must be an integer");
    ParamVector p;
    p.r = j["r"].get<int>();
    if (p.r < 1) throw Error("parse", "r: must be >= 1");
    if (!j["beta"].is_array() || (int)j["beta"].size() != p.r - 1)
        throw Error("parse", "beta: expected " + std::to_string(p.r - 1) + " entries");
    if (!j["gamma"].is_array() || (int)j["gamma"].size() != p.r)
        throw Error("parse", "gamma: expected " + std::to_string(p.r) + " entries");
    p.beta.push_back(Rat(0));
    for (int i = 0; i < p.r - 1; ++i)
        p.beta.push_back(parse_field(j["beta"][i], "beta[" + std::to_string(i) + "]"));
    p.beta.push_back(Rat(1));
    for (int s = 0; s < p.r; ++s)
        p.gamma.push_back(parse_field(j["gamma"][s], "gamma[" + std::to_string(s) + "]"));
    if (auto viol = validate_itm(p); !viol.empty())
        throw Error("parse", "invalid map: " + viol.front().constraint);
    return p;
}

ParamVector load_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("parse", path + ": " + e.what());
    }
    return map_from_json(j);
}

void save_map_file(const std::string& path, const ParamVector& p) {
    std::ofstream out(path);
    if (!out) throw Error("io", "cannot open " + path + " for writing");
    out << map_to_json(p).dump(2) << "\n";
}

json to_json(const SignedPoint& x) {
    return json{{"value", rat_str(x.value)}, {"side", std::string(1, side_char(x.side))}};
}

json to_json(const IntervalSet& s) {
    json arr = json::array();
    for (const auto& iv : s.intervals()) arr.push_back({rat_str(iv.lo), rat_str(iv.hi)});
    return arr;
}

json to_json(const AttractorResult& a) {
    json j;
    j["finite_type"] = a.finite_type;
    j["n_star"] = a.n_star;
    j["budget"] = a.budget;
    j["X"] = to_json(a.X);
    return j;
}

json to_json(const ComponentsReport& c) {
    json j;
    json comps = json::array();
    for (const auto& cc : c.components)
        comps.push_back({{"index", cc.index}, {"lo", rat_str(cc.lo)}, {"hi", rat_str(cc.hi)}});
    j["components"] = comps;
    j["boundary_criticals"] = c.boundary_criticals;
    json sm = json::array();
    for (const auto& m : c.signed_membership)
        sm.push_back({{"disc", m.disc},
                      {"side", std::string(1, side_char(m.side))},
                      {"in_x", m.in_x}});
    j["signed_membership"] = sm;
    return j;
}

json to_json(const ReturnMapData& d) {
    json j;
    j["component"] = {{"index", d.J.index}, {"lo", rat_str(d.J.lo)}, {"hi", rat_str(d.J.hi)}};
    j["N"] = d.N;
    json a = json::array();
    for (const auto& v : d.a) a.push_back(rat_str(v));
    j["a"] = a;
    json br = json::array();
    for (const auto& b : d.branches)
        br.push_back({{"lo", rat_str(b.lo)},
                      {"hi", rat_str(b.hi)},
                      {"return_time", b.return_time},
                      {"translation", rat_str(b.translation)}});
    j["branches"] = br;
    j["sigma"] = std::vector<int>(d.sigma.begin() + std::min<size_t>(1, d.sigma.size()),
                                  d.sigma.end());
    j["landing_times"] = d.landing_time;
    j["a0_lands"] = d.a0_lands;
    j["aN_lands"] = d.aN_lands;
    return j;
}

json to_json(const CorrespondenceReport& rep) {
    json arr = json::array();
    for (const auto& e : rep.per_disc) {
        const char* v = e.verdict == CorrVerdict::holds     ? "holds"
                        : e.verdict == CorrVerdict::fails   ? "fails"
                                                            : "not-applicable";
        arr.push_back({{"disc", e.disc}, {"verdict", v}});
    }
    return json{{"per_disc", arr}, {"all_hold", rep.all_hold()}};
}

json to_json(const A3Result& a3, const ParamVector& p) {
    json j;
    json edges = json::array();
    for (const auto& e : a3.g.edges)
        edges.push_back({{"from", ghost_node(p, e.from)},
                         {"to", ghost_node(p, e.to)},
                         {"time", e.time}});
    j["ghost_edges"] = edges;
    json viol = json::array();
    for (const auto& v : a3.violations) viol.push_back(ghost_node(p, v));
    j["violations"] = viol;
    j["pass"] = a3.pass();
    return j;
}

json to_json(const StabilityReport& rep, const ParamVector& p) {
    json j;
    j["attractor"] = to_json(rep.attractor);
    if (rep.attractor.finite_type) {
        j["components"] = to_json(rep.comps);
        json rms = json::array();
        for (const auto& c : rep.components) {
            json e = to_json(c.rm);
            e["class"] = c.cls == ComponentClass::dynamically_trivial ? "trivial" : "non-trivial";
            e["a1"] = c.a1;
            e["a2"] = c.a2;
            e["matching"] = c.matching;
            rms.push_back(e);
        }
        j["return_maps"] = rms;
        j["ghost_graph"] = to_json(rep.a3, p);
    }
    j["unstable_number"] = rep.unstable_number;
    j["a1"] = rep.a1;
    j["a2"] = rep.a2;
    j["a3"] = rep.a3_pass;
    j["matching"] = rep.matching;
    j["verdict"] = to_string(rep.verdict);
    return j;
}

json to_json(const CoefVector& v) {
    json e = json::array(), f = json::array();
    for (const auto& x : v.e) e.push_back((long long)x);
    for (const auto& x : v.f) f.push_back((long long)x);
    return json{{"e", e}, {"f", f}};
}

json to_json(const ComponentVectorBundle& b) {
    json j;
    j["r"] = b.r;
    j["N"] = b.N;
    json a = json::array();
    for (const auto& v : b.a) a.push_back(rat_str(v));
    j["a"] = a;
    json L = json::array();
    for (const auto& l : b.L) L.push_back(l ? to_json(*l) : json(nullptr));
    j["L"] = L;
    auto sides = [&](const std::vector<SideVectors>& sv) {
        json arr = json::array();
        for (const auto& s : sv) {
            json conns = json::array();
            for (const auto& c : s.connections) conns.push_back(to_json(c));
            arr.push_back({{"connections", conns},
                           {"return", to_json(s.ret)},
                           {"landing_form", s.landing_form}});
        }
        return arr;
    };
    j["plus"] = sides(b.plus);
    j["minus"] = sides(b.minus);
    return j;
}

json to_json(const PerturbationOutcome& out) {
    json j;
    j["status"] = to_string(out.status);
    j["detail"] = out.detail;
    j["result"] = map_to_json(out.result);
    json dg = json::array(), db = json::array();
    for (const auto& v : out.dgamma) dg.push_back(rat_str(v));
    for (const auto& v : out.dbeta) db.push_back(rat_str(v));
    j["dgamma"] = dg;
    j["dbeta"] = db;
    j["unstable_before"] = out.unstable_before;
    j["unstable_after"] = out.unstable_after;
    j["rounds"] = out.rounds;
    j["distance"] = rat_str(out.distance);
    return j;
}

json to_json(const PipelineTrail& trail) {
    json arr = json::array();
    for (const auto& s : trail.stages)
        arr.push_back({{"name", s.name},
                       {"status", to_string(s.status)},
                       {"u_before", s.u_before},
                       {"u_after", s.u_after},
                       {"distance", rat_str(s.distance)},
                       {"detail", s.detail}});
    return json{{"stages", arr}};
}

}  // namespace itm
