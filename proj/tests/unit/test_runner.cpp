#include "contacton/runner.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace contacton;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string schema_path(const json& doc) {
    try {
        parse_config(doc);
    } catch (const SchemaError& e) {
        return e.path();
    }
    return "<accepted>";
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("contacton_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli_runner") {

TEST_CASE("schema violations carry the field path") {
    CHECK(schema_path(json::object()) == "/hamiltonian");
    CHECK(schema_path({{"hamiltonian", {{"kind", "constant"}}}}) == "/hamiltonian/value");
    CHECK(schema_path({{"hamiltonian", {{"kind", "cubic"}}}}) == "/hamiltonian/kind");
    CHECK(schema_path({{"hamiltonian", {{"kind", "zero"}}}, {"suites", {"nope"}}}).rfind("/suites", 0) == 0);
    CHECK(schema_path({{"hamiltonian", {{"kind", "zero"}}}, {"tolerances", {{"axioms", -1.0}}}}) == "/tolerances/axioms");
    CHECK(schema_path({{"hamiltonian", {{"kind", "zero"}}}, {"manifold", {{"type", "standard"}, {"n", 9}}}}).rfind("/manifold", 0) == 0);
    CHECK(schema_path({{"hamiltonian", {{"kind", "linear_z"}}}}) == "<accepted>");
    CHECK(schema_path({{"hamiltonian", {{"type", "constant"}, {"c", 0.2}}}, {"manifold", {{"type", "standard_r2np1"}, {"n", 2}}}}) ==
          "<accepted>");
    CHECK(schema_path({{"hamiltonian", {{"type", "expr"}, {"H", "z"}, {"dH", {"0", "0", "1"}}, {"RH", "1"}}}}) == "<accepted>");
    CHECK(schema_path({{"hamiltonian", {{"type", "quartic"}}}}) == "/hamiltonian/type");
}

TEST_CASE("config parsing and hashing") {
    const json doc{{"hamiltonian", {{"kind", "constant"}, {"value", 0.5}}}, {"suites", {"action"}}, {"seed", 4}};
    const RunConfig c = parse_config(doc);
    CHECK(c.H.constant_value() == 0.5);
    CHECK(c.seed == 4u);
    CHECK(expand_suites(c.suites).size() >= 3);
    CHECK(config_hash(doc) == config_hash(json::parse(doc.dump())));
    CHECK(config_hash(doc).size() == 16);
    json other = doc;
    other["seed"] = 5;
    CHECK(config_hash(doc) != config_hash(other));
    CHECK(c.tolerance("axioms") == 1e-6);
    CHECK_THROWS(c.tolerance("no_such_key"));
}

TEST_CASE("triad suite run is deterministic") {
    const fs::path a = scratch("triad_a"), b = scratch("triad_b");
    RunConfig cfg = default_config();
    cfg.output = a;
    RunManifest m;
    CHECK(run(cfg, &m) == 0);
    CHECK(m.pass);
    const auto& suite = m.manifest["suites"][0];
    CHECK(suite["name"] == "triad");
    CHECK(suite["entries"].size() >= 6);
    cfg.output = b;
    CHECK(run(cfg) == 0);
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    CHECK(fs::exists(a / "timing.json"));
    CHECK(fs::exists(a / "triad.csv"));
}

TEST_CASE("report merges refinement runs") {
    const fs::path root = scratch("report");
    RunConfig cfg = parse_config({{"hamiltonian", {{"kind", "zero"}}}, {"suites", {"dulambda"}}, {"refine", 2}});
    cfg.output = root / "coarse";
    run(cfg);
    cfg.grid = StripGrid(cfg.grid.tau0, cfg.grid.tau1, 4 * cfg.grid.M, 4 * cfg.grid.N);
    cfg.output = root / "fine";
    run(cfg);

    const ReportTables t = report(root);
    CHECK(t.warnings.empty());
    CHECK(t.pass_matrix.size() == 2);
    std::vector<json> rows;
    for (const auto& r : t.convergence)
        if (r["entry"] == "du_lambdaH") rows.push_back(r);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0]["order"].is_null());
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double r1 = rows[k - 1]["max"], r2 = rows[k]["max"];
        CHECK(rows[k - 1]["h"].get<double>() == doctest::Approx(2 * rows[k]["h"].get<double>()));
        CHECK(rows[k]["order"].get<double>() == doctest::Approx(std::log2(r1 / r2)).epsilon(1e-12));
        CHECK(rows[k]["order"].get<double>() > 1.8);
    }
    CHECK(rows[2]["source"] == "fine");

    // a manifest from another artifact version stays in its own group
    json m = json::parse(slurp(root / "fine" / "manifest.json"));
    m["artifact_version"] = "0.0.9";
    fs::create_directories(root / "old");
    std::ofstream(root / "old" / "manifest.json") << m.dump(2);
    std::ofstream(root / "broken").put('x');
    fs::create_directories(root / "corrupt");
    std::ofstream(root / "corrupt" / "manifest.json") << "{ not json";
    const ReportTables t2 = report(root);
    CHECK(t2.warnings.size() == 1);
    int current = 0, old = 0;
    for (const auto& r : t2.convergence) {
        if (r["entry"] != "du_lambdaH") continue;
        const std::string v = r["version"];
        if (v == std::string(kArtifactVersion) + "/schema1") ++current;
        else if (v == "0.0.9/schema1") ++old;
    }
    CHECK(current == 4);
    CHECK(old == 2);
}

TEST_CASE("empty report directory") {
    const ReportTables t = report(scratch("empty"));
    CHECK(t.convergence.empty());
    CHECK(t.pass_matrix.empty());
    CHECK(t.warnings.size() == 1);
}

}
