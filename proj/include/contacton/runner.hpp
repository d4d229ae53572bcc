#pragma once

#include "contacton/solver.hpp"
#include "contacton/report.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace contacton {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kManifestSchema = 1;

// Config violation; `path` is a JSON pointer such as "/hamiltonian/kind".
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct RunConfig {
    nlohmann::json source;  // the parsed document, used for the hash
    int n = 1;
    HamiltonianSpec H = HamiltonianSpec::zero(1);
    std::string hamiltonian_label = "zero";
    StripGrid grid{-1.0, 1.0, 16, 8};
    int path_N = 200;
    int path_count = 20;
    int refine = 3;  // grid levels in refinement studies
    std::vector<std::string> suites{"triad"};
    std::map<std::string, double> tolerances;
    unsigned seed = 1;
    std::filesystem::path output = "contacton_out";
    SolveConfig solver;
    bool parallel_suites = false;

    double tolerance(const std::string& key) const;
};

// Known suite names, and the aliases "action" and "validate".
const std::vector<std::string>& suite_names();
std::vector<std::string> expand_suites(const std::vector<std::string>& names);

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
RunConfig default_config();

// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& doc);

struct SuiteResult {
    std::string name;
    bool pass = false;
    nlohmann::json data;  // "entries": residual table rows, plus suite-specific fields
    double seconds = 0.0;
};

SuiteResult run_suite(const std::string& name, const RunConfig& cfg);

struct RunManifest {
    nlohmann::json manifest;  // deterministic part
    nlohmann::json timing;
    bool pass = false;
};

// Runs the selected suites and writes manifest.json, timing.json and per-suite CSV tables
// (plus solver artifacts) under cfg.output. Returns 0 when every suite passes, 1 otherwise.
int run(const RunConfig& cfg, RunManifest* out = nullptr);

struct ReportTables {
    nlohmann::json convergence;  // rows: version, suite, entry, h, max, order
    nlohmann::json pass_matrix;  // rows: manifest, version, suite, pass
    std::vector<std::string> warnings;
};

// Merges every manifest.json found in dir (and its immediate subdirectories). Orders come
// from consecutive spacings of runs sharing version, suite and entry: log(r1/r2)/log(h1/h2).
ReportTables report(const std::filesystem::path& dir);
void write_report(const ReportTables& t, const std::filesystem::path& out_dir);

// Rows of a residual report for manifests and CSV tables.
nlohmann::json report_rows(const ResidualReport& r, const StripGrid* grid = nullptr, int level = 0);

}  // namespace contacton
