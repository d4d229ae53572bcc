// contacton: command-line front end for the suites in the runner.
//
//   contacton run --config cfg.json --out dir [--seed S] [--refine R] [--suite NAME]...
//   contacton triad check | flow | action eval|vary|crit | instanton validate|solve
//   contacton report DIR [--out DIR]
//
// Exit codes: 0 all suites pass, 1 a suite failed, 2 config schema violation, 3 runtime error.

#include "contacton/runner.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

namespace {

using namespace contacton;

struct Common {
    std::string config;
    std::string out;
    long long seed = -1;
    int refine = 0;
    std::vector<std::string> suites;
    bool parallel = false;
};

void add_common(CLI::App* app, Common& c, bool with_suite) {
    app->add_option("--config", c.config, "JSON run config (built-in defaults when omitted)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "RNG seed override")->check(CLI::NonNegativeNumber);
    app->add_option("--refine", c.refine, "grid levels in refinement studies")->check(CLI::Range(1, 6));
    if (with_suite) app->add_option("--suite", c.suites, "suite to run (repeatable)");
    app->add_flag("--parallel-suites", c.parallel, "run suites concurrently");
}

void print_entries(const nlohmann::json& rows) {
    for (const auto& r : rows) {
        std::cout << "    " << std::left << std::setw(40) << r.value("entry", std::string()) << std::right;
        if (r.contains("M")) std::cout << " " << r["M"].get<int>() << "x" << r["N"].get<int>();
        std::cout << " max=" << std::scientific << std::setprecision(3) << r.value("max", 0.0);
        if (r.contains("order") && r["order"].is_number()) std::cout << " order=" << std::fixed << std::setprecision(2) << r["order"].get<double>();
        const char* flag = r.value("pass", false) ? "" : r.value("gated", true) ? "  FAIL" : "  (informational)";
        std::cout << std::defaultfloat << flag << '\n';
    }
}

int execute(const Common& c, const std::vector<std::string>& default_suites) {
    RunConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
    if (!c.suites.empty()) cfg.suites = c.suites;
    else if (!default_suites.empty()) cfg.suites = default_suites;
    for (const auto& s : expand_suites(cfg.suites))
        if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
            throw SchemaError("/suites", "unknown suite '" + s + "'");
    if (c.seed >= 0) {
        cfg.seed = static_cast<unsigned>(c.seed);
        cfg.solver.rng_seed = cfg.seed;
    }
    if (c.refine > 0) cfg.refine = c.refine;
    if (!c.out.empty()) cfg.output = c.out;
    cfg.parallel_suites = cfg.parallel_suites || c.parallel;

    RunManifest m;
    const int code = run(cfg, &m);
    for (const auto& s : m.manifest["suites"]) {
        std::cout << (s["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << s["name"].get<std::string>() << '\n';
        if (s.contains("entries")) print_entries(s["entries"]);
        if (s.contains("solve")) std::cout << "    solver: " << s["solve"].dump() << '\n';
    }
    std::cout << "manifest: " << (cfg.output / "manifest.json").string() << " hash "
              << m.manifest["config_hash"].get<std::string>() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"contacton: contact instanton numerics"};
    app.require_subcommand(1);

    Common c;
    std::vector<std::string> defaults;
    std::string report_dir, report_out;

    auto* run_cmd = app.add_subcommand("run", "run the suites selected in the config");
    add_common(run_cmd, c, true);

    auto* triad = app.add_subcommand("triad", "triad connection checks");
    auto* triad_check = triad->add_subcommand("check", "axioms and Christoffel symbols");
    triad->require_subcommand(1);
    add_common(triad_check, c, false);

    auto* flow = app.add_subcommand("flow", "contact Hamiltonian flow and conformal exponents");
    add_common(flow, c, false);

    auto* action = app.add_subcommand("action", "perturbed action functional");
    action->require_subcommand(1);
    auto* a_eval = action->add_subcommand("eval", "action identity under the gauge transformation");
    auto* a_vary = action->add_subcommand("vary", "first variation against difference quotients");
    auto* a_crit = action->add_subcommand("crit", "lifting of critical paths");
    for (auto* s : {a_eval, a_vary, a_crit}) add_common(s, c, false);

    auto* inst = app.add_subcommand("instanton", "instanton validators and solver");
    inst->require_subcommand(1);
    auto* validate = inst->add_subcommand("validate", "identity validators on smooth test families");
    auto* solve_cmd = inst->add_subcommand("solve", "least-squares solver, energy-action and asymptotics");
    add_common(validate, c, true);
    add_common(solve_cmd, c, false);

    auto* rep = app.add_subcommand("report", "merge manifests into tables");
    rep->add_option("dir", report_dir, "directory holding manifests")->required();
    rep->add_option("--out", report_out, "where to write the tables (default: dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*rep) {
            const ReportTables t = report(report_dir);
            for (const auto& w : t.warnings) std::cerr << "warning: " << w << '\n';
            write_report(t, report_out.empty() ? report_dir : report_out);
            std::cout << t.convergence.size() << " convergence rows, " << t.pass_matrix.size() << " suite results\n";
            return 0;
        }
        if (*triad_check) defaults = {"triad"};
        else if (*flow) defaults = {"flow"};
        else if (*a_eval) defaults = {"action_identity"};
        else if (*a_vary) defaults = {"first_variation"};
        else if (*a_crit) defaults = {"lifting"};
        else if (*validate) defaults = {"validate"};
        else if (*solve_cmd) defaults = {"energy_action", "asymptotics"};
        return execute(c, defaults);
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
