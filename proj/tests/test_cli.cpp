#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "itm/json_io.hpp"

#include "test_util.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace itm;
using namespace itm::testing;

namespace {

int run(const std::string& args) {
    int rc = std::system(("./itmlab " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempMap {
    std::string path;
    TempMap(const std::string& name, const ParamVector& p) : path(name) {
        save_map_file(path, p);
    }
    ~TempMap() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("analyze exit codes: stable, unstable, parse error") {
    TempMap f2("cli_m2.json", m2());
    TempMap f3("cli_m3.json", m3());
    CHECK(run("analyze " + f2.path) == 0);
    CHECK(run("analyze " + f3.path) == 1);
    std::ofstream("cli_bad.json") << "{\"r\":2,\"beta\":[\"1/0\"],\"gamma\":[\"0\",\"0\"]}";
    CHECK(run("analyze cli_bad.json") == 64);
    std::remove("cli_bad.json");
    CHECK(run("analyze cli_missing.json") == 64);
}

TEST_CASE("analyze text report names the ghost cycle") {
    TempMap f3("cli_m3b.json", m3());
    REQUIRE(run("analyze " + f3.path + " --format text -o cli_m3b.txt") == 1);
    std::string rep = slurp("cli_m3b.txt");
    CHECK(rep.find("unstable") != std::string::npos);
    CHECK(rep.find("b1-") != std::string::npos);
    CHECK(rep.find("b2+") != std::string::npos);
    std::remove("cli_m3b.txt");
}

TEST_CASE("perturb stabilizes the unstable fixture and the output re-verifies") {
    TempMap f3("cli_m3c.json", m3());
    REQUIRE(run("perturb " + f3.path + " --eps 1/64 -o cli_m3c_out.json") == 0);
    json j = json::parse(slurp("cli_m3c_out.json"));
    CHECK(j["status"] == "success");
    save_map_file("cli_m3c_stable.json", map_from_json(j["result"]));
    // a fresh analyze process must agree
    CHECK(run("analyze cli_m3c_stable.json") == 0);
    std::remove("cli_m3c_out.json");
    std::remove("cli_m3c_stable.json");
}

TEST_CASE("perturb leaves a stable map alone and rejects eps 0") {
    TempMap f2("cli_m2b.json", m2());
    REQUIRE(run("perturb " + f2.path + " -o cli_m2b_out.json") == 0);
    json j = json::parse(slurp("cli_m2b_out.json"));
    CHECK(map_from_json(j["result"]) == m2());
    CHECK(j["distance"] == "0");
    std::remove("cli_m2b_out.json");
    CHECK(run("perturb " + f2.path + " --eps 0") == 64);
}

TEST_CASE("scan outputs are byte-identical for 1 and 8 workers") {
    std::ofstream("cli_scan.json") << R"({
        "base": {"r":2,"beta":["1/2"],"gamma":["1/4","-1/2"]},
        "x": {"kind":"gamma","index":0,"lo":"0","hi":"1/2","cells":6},
        "y": {"kind":"gamma","index":1,"lo":"-1/2","hi":"0","cells":6},
        "depth":"full-stability"})";
    REQUIRE(run("scan cli_scan.json --csv cli_s1.csv --ppm cli_s1.ppm --workers 1") == 0);
    REQUIRE(run("scan cli_scan.json --csv cli_s8.csv --ppm cli_s8.ppm --workers 8") == 0);
    CHECK(slurp("cli_s1.csv") == slurp("cli_s8.csv"));
    CHECK(slurp("cli_s1.ppm") == slurp("cli_s8.ppm"));
    CHECK(slurp("cli_s1.csv").find("stable") != std::string::npos);
    for (const char* f : {"cli_scan.json", "cli_s1.csv", "cli_s1.ppm", "cli_s8.csv",
                          "cli_s8.ppm"})
        std::remove(f);
}

TEST_CASE("vectors command emits the bundle and flags bad components") {
    TempMap f2("cli_m2c.json", m2());
    REQUIRE(run("vectors " + f2.path + " 0 -o cli_m2c_vec.json") == 0);
    json j = json::parse(slurp("cli_m2c_vec.json"));
    CHECK(j["identities_pass"] == true);
    CHECK(j["bundle"]["N"] == 2);
    std::remove("cli_m2c_vec.json");
    CHECK(run("vectors " + f2.path + " 5") == 64);
}
