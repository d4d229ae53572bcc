#include "contacton/runner.hpp"

#include "contacton/connection.hpp"
#include "contacton/families.hpp"
#include "contacton/validators.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace contacton {

using nlohmann::json;
namespace fs = std::filesystem;

SchemaError::SchemaError(std::string path, const std::string& what)
    : Error(path + ": " + what), path_(std::move(path)) {}

double RunConfig::tolerance(const std::string& key) const {
    static const std::map<std::string, double> defaults{
        {"axioms", 1e-6},         {"flow", 1e-8},           {"closed_form_flow", 1e-9},
        {"action_identity", 1e-5}, {"action_order", 1.8},   {"first_variation", 5e-3},
        {"boundary_terms", 1e-10}, {"lifting", 1e-5},       {"gauge_order", 1.8},
        {"solver_residual", 1e-5}, {"energy_action", 1e-4}, {"chord_fit", 1e-3},
        {"charge", 1e-4},          {"fundamental_order", 0.9}, {"dulambda_order", 1.8},
        {"isothermal_order", 1.8}, {"weitzenbock_order", 0.9}, {"calculus_order", 1.8}};
    if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
    return defaults.at(key);
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"triad",       "flow",        "action_identity", "first_variation",
                                                "lifting",     "gauge",       "fundamental",     "dulambda",
                                                "isothermal",  "weitzenbock", "calculus",        "energy_action",
                                                "asymptotics"};
    return names;
}

std::vector<std::string> expand_suites(const std::vector<std::string>& names) {
    std::vector<std::string> out;
    auto push = [&](const std::string& s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    };
    for (const auto& s : names) {
        if (s == "action") {
            for (const char* a : {"action_identity", "first_variation", "lifting"}) push(a);
        } else if (s == "validate") {
            for (const char* a : {"fundamental", "dulambda", "isothermal", "weitzenbock", "calculus"}) push(a);
        } else if (s == "all") {
            for (const auto& a : suite_names()) push(a);
        } else {
            push(s);
        }
    }
    return out;
}

namespace {

// ---- schema helpers ----

const json* member(const json& obj, const std::string& key, const std::string& path, bool required) {
    if (!obj.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) throw SchemaError(path + "/" + key, "required field is missing");
        return nullptr;
    }
    return &*it;
}

double number(const json& obj, const std::string& key, const std::string& path, double def, bool positive = false) {
    const json* v = member(obj, key, path, false);
    if (!v) return def;
    if (!v->is_number()) throw SchemaError(path + "/" + key, "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw SchemaError(path + "/" + key, "expected a finite number");
    if (positive && !(x > 0.0)) throw SchemaError(path + "/" + key, "must be positive");
    return x;
}

int integer(const json& obj, const std::string& key, const std::string& path, int def, int lo, int hi) {
    const json* v = member(obj, key, path, false);
    if (!v) return def;
    if (!v->is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
    const auto x = v->get<long long>();
    if (x < lo || x > hi)
        throw SchemaError(path + "/" + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

std::string string(const json& obj, const std::string& key, const std::string& path, const std::string& def,
                   bool required = false) {
    const json* v = member(obj, key, path, required);
    if (!v) return def;
    if (!v->is_string()) throw SchemaError(path + "/" + key, "expected a string");
    return v->get<std::string>();
}

Vec vector_of(const json& v, const std::string& path, int size) {
    if (!v.is_array()) throw SchemaError(path, "expected an array of numbers");
    if (static_cast<int>(v.size()) != size)
        throw SchemaError(path, "expected " + std::to_string(size) + " entries");
    Vec out(size);
    for (int i = 0; i < size; ++i) {
        if (!v[i].is_number()) throw SchemaError(path + "/" + std::to_string(i), "expected a number");
        out(i) = v[i].get<double>();
    }
    return out;
}

HamiltonianSpec parse_hamiltonian(const json& h, const std::string& path, int n, std::string& label) {
    if (!h.is_object()) throw SchemaError(path, "expected an object");
    // "type", "c" and "expr" are accepted as spellings of "kind", "value" and "expression".
    const char* kind_key = h.contains("kind") || !h.contains("type") ? "kind" : "type";
    std::string kind = string(h, kind_key, path, "", true);
    if (kind == "expr") kind = "expression";
    label = kind;
    if (kind == "zero") return HamiltonianSpec::zero(n);
    if (kind == "constant") {
        const char* value_key = h.contains("value") || !h.contains("c") ? "value" : "c";
        const double c = number(h, value_key, path, 0.0);
        if (!member(h, value_key, path, false)) throw SchemaError(path + "/value", "required field is missing");
        std::ostringstream os;
        os << "constant(" << c << ")";
        label = os.str();
        return HamiltonianSpec::constant(n, c);
    }
    if (kind == "linear_z") return HamiltonianSpec::linear_z(n);
    if (kind == "expression") {
        const std::string H = string(h, "H", path, "", true);
        const std::string RH = string(h, "RH", path, "", true);
        const json* d = member(h, "dH", path, true);
        if (!d->is_array() || static_cast<int>(d->size()) != 2 * n + 1)
            throw SchemaError(path + "/dH", "expected " + std::to_string(2 * n + 1) + " partial derivatives");
        std::vector<std::string> dH;
        for (std::size_t i = 0; i < d->size(); ++i) {
            if (!(*d)[i].is_string()) throw SchemaError(path + "/dH/" + std::to_string(i), "expected a string");
            dH.push_back((*d)[i].get<std::string>());
        }
        label = "expression(" + H + ")";
        try {
            return HamiltonianSpec::expression(n, H, dH, RH);
        } catch (const Error& e) {
            throw SchemaError(path, e.what());
        }
    }
    throw SchemaError(path + "/" + kind_key, "unknown Hamiltonian kind '" + kind + "'");
}

LegendrianSpec parse_legendrian(const json& obj, const std::string& path, const TriadChart& chart) {
    const int n = chart.n(), d = chart.dim();
    const Vec p = vector_of(*member(obj, "point", path, true), path + "/point", d);
    const json& T = *member(obj, "tangents", path, true);
    if (!T.is_array() || static_cast<int>(T.size()) != n)
        throw SchemaError(path + "/tangents", "expected " + std::to_string(n) + " tangent vectors");
    Mat V(d, n);
    for (int k = 0; k < n; ++k) V.col(k) = vector_of(T[k], path + "/tangents/" + std::to_string(k), d);
    try {
        return LegendrianSpec::affine(chart, p, V);
    } catch (const Error& e) {
        throw SchemaError(path, e.what());
    }
}

// ---- suite helpers ----

struct Context {
    const RunConfig& cfg;
    TriadChart chart;
    std::optional<SolveResult> solved;
};

json entry_row(const ResidualEntry& e) {
    json r{{"entry", e.name}, {"l2", e.l2}, {"max", e.max}, {"tolerance", e.tolerance}, {"pass", e.pass}};
    r["order"] = e.order ? json(*e.order) : json(nullptr);
    return r;
}

void append_rows(json& rows, const json& more) {
    for (const auto& r : more) rows.push_back(r);
}

std::mt19937 path_rng(unsigned seed, int k) { return std::mt19937(seed * 7919u + static_cast<unsigned>(k)); }

// gamma' = X_H(t, gamma) + f(t) R with f(t) = a + b sin(pi t): Pi(gamma' - X_H) = 0.
PathGamma critical_path(const TriadChart& chart, const HamiltonianSpec& H, const Vec& p0, double a, double b, int N) {
    const int sub = 8;
    const double h = 1.0 / (N * sub);
    auto rhs = [&](double t, const Vec& x) -> Vec {
        return contact_field(chart, H, t, x) + (a + b * std::sin(M_PI * t)) * chart.reeb(x);
    };
    std::vector<Vec> pts{p0};
    Vec x = p0;
    for (int k = 0; k < N; ++k)
        for (int s = 0; s < sub; ++s) {
            const double t = (k * sub + s) * h;
            const Vec k1 = rhs(t, x), k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1), k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2),
                      k4 = rhs(t + h, x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (s == sub - 1) pts.push_back(x);
        }
    return PathGamma(chart.n(), std::move(pts));
}

bool order_ok(const std::optional<double>& order, double need) { return !order || *order >= need; }

// Refinement study rows with grid metadata; gates entries in `gated` on the order at the finest level.
json study_rows(const std::vector<ConvergenceLevel>& levels) {
    json rows = json::array();
    for (std::size_t k = 0; k < levels.size(); ++k) append_rows(rows, report_rows(levels[k].report, &levels[k].grid, static_cast<int>(k)));
    return rows;
}

SuiteResult study_suite(const std::string& name, const std::vector<ConvergenceLevel>& levels,
                        const std::vector<std::string>& gated, double need_order) {
    SuiteResult r;
    r.name = name;
    r.pass = true;
    r.data["entries"] = study_rows(levels);
    for (auto& row : r.data["entries"])
        row["gated"] = std::find(gated.begin(), gated.end(), row["entry"].get<std::string>()) != gated.end();
    json checks = json::array();
    const ResidualReport& fine = levels.back().report;
    for (const auto& g : gated) {
        const ResidualEntry* e = fine.find(g);
        if (!e) continue;
        bool ok = true;
        for (const auto& lv : levels) {
            const ResidualEntry* el = lv.report.find(g);
            ok = ok && el && el->pass;
        }
        const bool ord = levels.size() < 2 || order_ok(e->order, need_order);
        checks.push_back({{"entry", g}, {"all_levels_within_tolerance", ok}, {"order", e->order ? json(*e->order) : json(nullptr)},
                          {"required_order", need_order}, {"pass", ok && ord}});
        r.pass = r.pass && ok && ord;
    }
    r.data["gated"] = checks;
    return r;
}

bool j_preserving(const HamiltonianSpec& H) { return H.kind() == HamiltonianSpec::Kind::Constant; }

// A smooth map that is Cauchy-Riemann for H: the gauge image of the holomorphic lift when the
// flow preserves J, the H = z family otherwise (n = 1; not closed).
MapField smooth_test_field(const Context& cx, const ContactIsotopy& iso, const StripGrid& g) {
    const HamiltonianSpec& H = cx.cfg.H;
    if (j_preserving(H)) return gauge_transformed(iso, g, default_holomorphic_lift(cx.chart.n()));
    if (H.kind() == HamiltonianSpec::Kind::LinearZ && cx.chart.n() == 1)
        return MapField::sample(g, 1, linear_z_cr_family(0.4, 0.7, [](Complex w) { return 0.3 * std::cos(w); }));
    throw Error("no Cauchy-Riemann test family for Hamiltonian '" + cx.cfg.hamiltonian_label +
                "' (available: zero, constant, linear_z with n = 1)");
}

// ---- suites ----

SuiteResult suite_triad(Context& cx) {
    const RunConfig& c = cx.cfg;
    SuiteResult r;
    r.name = "triad";
    ResidualReport rep = verify_triad_axioms(cx.chart, standard_connection(cx.chart), 100, c.seed, c.tolerance("axioms"));
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    double diff = 0.0;
    for (int s = 0; s < 10; ++s) {
        Vec p(cx.chart.dim());
        for (int k = 0; k < p.size(); ++k) p(k) = U(rng);
        const ConnectionCoeffs a = christoffel_at(cx.chart, p), b = christoffel_from_axioms(cx.chart, p);
        for (std::size_t k = 0; k < a.G.size(); ++k) diff = std::max(diff, std::abs(a.G[k] - b.G[k]));
    }
    rep.add("christoffel_solved_vs_closed_form", diff, diff, c.tolerance("axioms"));
    r.pass = rep.all_pass();
    r.data["entries"] = report_rows(rep);
    return r;
}

SuiteResult suite_flow(Context& cx) {
    const RunConfig& c = cx.cfg;
    const ContactIsotopy iso(cx.chart, c.H, 1000);
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double pull = 0.0, inv = 0.0, closed_pt = 0.0, closed_g = 0.0;
    const bool linz = c.H.kind() == HamiltonianSpec::Kind::LinearZ;
    for (int s = 0; s < 20; ++s) {
        Vec p(cx.chart.dim()), v(cx.chart.dim());
        for (int k = 0; k < p.size(); ++k) {
            p(k) = U(rng);
            v(k) = U(rng);
        }
        for (double t : {0.25, 0.5, 1.0}) {
            pull = std::max(pull, pullback_residual(iso, t, p, v));
            inv = std::max(inv, conformal_exponent_inverse_check(iso, p, t));
        }
        if (linz) {
            const FlowResult a = iso.transport(p, 0.0, 1.0), b = linear_z_flow(cx.chart, p, 0.0, 1.0);
            closed_pt = std::max(closed_pt, (a.point - b.point).norm());
            closed_g = std::max(closed_g, std::abs(a.g - b.g));
        }
    }
    ResidualReport rep;
    rep.add("pullback", pull, pull, c.tolerance("flow"));
    rep.add("exponent_inverse", inv, inv, c.tolerance("flow"));
    if (linz) {
        rep.add("closed_form_point", closed_pt, closed_pt, c.tolerance("closed_form_flow"));
        rep.add("closed_form_exponent", closed_g, closed_g, c.tolerance("closed_form_flow"));
    }
    SuiteResult r;
    r.name = "flow";
    r.pass = rep.all_pass();
    r.data["entries"] = report_rows(rep);
    r.data["rk4_step"] = iso.dt();
    return r;
}

SuiteResult suite_action_identity(Context& cx) {
    const RunConfig& c = cx.cfg;
    const ContactIsotopy iso(cx.chart, c.H, 1000);
    const int n = cx.chart.n();
    std::vector<double> worst(3, 0.0);
    const std::array<int, 3> Ns{c.path_N / 4, c.path_N / 2, c.path_N};
    for (int k = 0; k < c.path_count; ++k)
        for (int l = 0; l < 3; ++l) {
            std::mt19937 rng = path_rng(c.seed, k);
            worst[l] = std::max(worst[l], action_identity_residual(cx.chart, c.H, iso, random_path(n, Ns[l], rng)));
        }
    ResidualReport rep;
    auto& e = rep.add("action_identity", worst[2], worst[2], c.tolerance("action_identity"));
    const double floor = 1e-12;
    if (worst[1] > floor && worst[2] > floor) e.order = observed_order(worst[1], worst[2]);
    e.pass = e.pass && order_ok(e.order, c.tolerance("action_order"));
    SuiteResult r;
    r.name = "action_identity";
    r.pass = rep.all_pass();
    r.data["entries"] = report_rows(rep);
    r.data["levels"] = json::array();
    for (int l = 0; l < 3; ++l) r.data["levels"].push_back({{"N", Ns[l]}, {"max", worst[l]}});
    return r;
}

SuiteResult suite_first_variation(Context& cx) {
    const RunConfig& c = cx.cfg;
    const ContactIsotopy iso(cx.chart, c.H, 1000);
    const int n = cx.chart.n();
    double free_err = 0.0, bterm = 0.0, tagged_err = 0.0;
    for (int k = 0; k < c.path_count; ++k) {
        std::mt19937 rng = path_rng(c.seed, k);
        PathGamma g = random_path(n, c.path_N, rng);
        const VariationField eta = random_variation(g, rng);
        const double fv = first_variation(cx.chart, c.H, iso, g, eta).total();
        free_err = std::max(free_err, std::abs(fv - action_difference_quotient(cx.chart, c.H, iso, g, eta, 1e-3)));

        // Same path bent so that its ends lie on the boundary Legendrians.
        const Vec d0 = c.solver.R0.project(g.points.front()) - g.points.front();
        const Vec d1 = c.solver.R1.project(g.points.back()) - g.points.back();
        for (int j = 0; j <= g.intervals(); ++j) g.points[j] += (1.0 - g.t(j)) * d0 + g.t(j) * d1;
        g.R0 = c.solver.R0;
        g.R1 = c.solver.R1;
        const VariationField te = random_variation(g, rng, true);
        const FirstVariation tv = first_variation(cx.chart, c.H, iso, g, te);
        bterm = std::max({bterm, std::abs(tv.boundary_end), std::abs(tv.boundary_start)});
        tagged_err = std::max(tagged_err, std::abs(tv.total() - action_difference_quotient(cx.chart, c.H, iso, g, te, 1e-3)));
    }
    ResidualReport rep;
    rep.add("formula_vs_difference_quotient", free_err, free_err, c.tolerance("first_variation"));
    rep.add("tagged_formula_vs_difference_quotient", tagged_err, tagged_err, c.tolerance("first_variation"));
    rep.add("tagged_boundary_terms", bterm, bterm, c.tolerance("boundary_terms"));
    SuiteResult r;
    r.name = "first_variation";
    r.pass = rep.all_pass();
    r.data["entries"] = report_rows(rep);
    r.data["epsilon"] = 1e-3;
    return r;
}

SuiteResult suite_lifting(Context& cx) {
    const RunConfig& c = cx.cfg;
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0, pi_worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        Vec p(cx.chart.dim());
        for (int i = 0; i < p.size(); ++i) p(i) = U(rng);
        const PathGamma g = critical_path(cx.chart, c.H, p, U(rng), U(rng), c.path_N);
        const LiftResult lr = lift_to_hamiltonian_trajectory(cx.chart, c.H, g);
        worst = std::max(worst, lr.residual);
        pi_worst = std::max(pi_worst, lr.pi_residual);
    }
    ResidualReport rep;
    rep.add("hamilton_equation", worst, worst, c.tolerance("lifting"));
    SuiteResult r;
    r.name = "lifting";
    r.pass = rep.all_pass();
    r.data["entries"] = report_rows(rep);
    r.data["input_pi_residual"] = pi_worst;
    return r;
}

SuiteResult suite_gauge(Context& cx) {
    const RunConfig& c = cx.cfg;
    const ContactIsotopy iso(cx.chart, c.H, 1000);
    const int n = cx.chart.n();
    const bool keeps_J = j_preserving(c.H);
    auto run_family = [&](const StripMap& ubar, std::optional<LegendrianSpec> R0, std::optional<LegendrianSpec> R1) {
        return refinement_study(
            [&](const StripGrid& g) {
                const MapField u = gauge_transformed(iso, g, ubar, R0, R1);
                const GaugeEquivalence ge = gauge_equivalence_check(cx.chart, c.H, iso, u);
                const double h = g.spacing(), tol = 10.0 * h * h * field_scale(u);
                ResidualReport rep;
                rep.add("perturbed_cr", ge.perturbed.cr_l2, ge.perturbed.cr_max, tol);
                rep.add("perturbed_closed", ge.perturbed.closed_l2, ge.perturbed.closed_max, tol);
                rep.add("unperturbed_cr", ge.unperturbed.cr_l2, ge.unperturbed.cr_max, tol);
                rep.add("unperturbed_closed", ge.unperturbed.closed_l2, ge.unperturbed.closed_max, tol);
                if (R0 || R1) {
                    const double bd = u.boundary_defect();
                    rep.add("boundary_defect", bd, bd, 1e-6);
                }
                if (keeps_J) {
                    const double de = std::abs(ge.energy_perturbed - ge.energy_unperturbed);
                    rep.add("energy_difference", de, de, tol);
                }
                return rep;
            },
            c.grid, std::max(c.refine, 2), 1e-9);
    };
    Vec x0 = Vec::Constant(n, 0.3);
    const auto strip = run_family(reeb_strip(x0, 1.0, 0.0), x_plane(cx.chart, 0.0), x_plane(cx.chart, 1.0));
    // Holomorphic lifts stay Cauchy-Riemann under J-preserving flows only; otherwise
    // (x0, 0, Re h) keeps the xi-part at zero and the closedness part nontrivial.
    const auto holo = keeps_J ? run_family(default_holomorphic_lift(n), std::nullopt, std::nullopt)
                              : run_family(holomorphic_lift(std::vector<HoloFn>(n, [](Complex) { return Complex(0.3, 0.0); }),
                                                            [](Complex w) { return 0.4 * std::cos(w) + Complex(0.0, 0.3) * w * w; }),
                                           std::nullopt, std::nullopt);

    SuiteResult r;
    r.name = "gauge";
    r.pass = true;
    json rows = json::array();
    json checks = json::array();
    auto gate = [&](const std::string& family, const std::vector<ConvergenceLevel>& lv) {
        json fr = study_rows(lv);
        for (auto& row : fr) row["family"] = family;
        append_rows(rows, fr);
        for (const auto& e : lv.back().report.entries) {
            bool ok = true;
            for (const auto& l : lv) ok = ok && l.report.at(e.name).pass;
            const bool ord = order_ok(e.order, c.tolerance("gauge_order"));
            checks.push_back({{"family", family}, {"entry", e.name}, {"pass", ok && ord},
                              {"order", e.order ? json(*e.order) : json(nullptr)}});
            r.pass = r.pass && ok && ord;
        }
    };
    gate("reeb_strip", strip);
    gate(keeps_J ? "holomorphic_lift" : "reeb_harmonic", holo);
    r.data["entries"] = rows;
    r.data["gated"] = checks;
    return r;
}

SuiteResult suite_validator(Context& cx, const std::string& name) {
    const RunConfig& c = cx.cfg;
    const ContactIsotopy iso(cx.chart, c.H, 1000);
    const int levels = std::max(c.refine, 2);
    if (name == "calculus") {
        const auto lv = refinement_study([&](const StripGrid& g) { return vector_form_calculus_check(g, c.seed); },
                                         c.grid, levels);
        return study_suite(name, lv, {"metric_property_pointwise", "dnabla_two_assemblies"},
                           c.tolerance("calculus_order"));
    }
    const bool closed_family = j_preserving(c.H);
    auto run = [&](const StripGrid& g) {
        const MapField u = smooth_test_field(cx, iso, g);
        if (name == "fundamental") return fundamental_equation_residual(cx.chart, c.H, u);
        if (name == "dulambda") return du_lambdaH_residual(cx.chart, c.H, u);
        if (name == "isothermal") {
            ValidatorOptions opt;
            opt.check_preconditions = closed_family;
            return isothermal_system_residual(cx.chart, c.H, iso, u, opt);
        }
        return weitzenbock_laplacian_residual(cx.chart, c.H, u);
    };
    const auto lv = refinement_study(run, c.grid, levels);
    if (name == "fundamental") return study_suite(name, lv, {"fundamental"}, c.tolerance("fundamental_order"));
    if (name == "dulambda") return study_suite(name, lv, {"du_lambdaH"}, c.tolerance("dulambda_order"));
    if (name == "isothermal") {
        // The H = z family is not closed, so only the zeta equations are gated there.
        std::vector<std::string> gated{"zeta_B_lambda", "zeta_B_lambdaH"};
        if (closed_family) gated.insert(gated.begin(), "alpha_dbar");
        SuiteResult r = study_suite(name, lv, gated, c.tolerance("isothermal_order"));
        r.data["closed_family"] = closed_family;
        return r;
    }
    return study_suite(name, lv, {"weitzenbock"}, c.tolerance("weitzenbock_order"));
}

const SolveResult& solved(Context& cx) {
    if (!cx.solved) cx.solved = solve(cx.chart, cx.cfg.solver);
    return *cx.solved;
}

json solve_summary(const SolveReport& s) {
    return {{"status", s.status},
            {"iterations", s.iterations},
            {"objective", s.objective},
            {"box_cr_l2", s.cr_l2},
            {"box_closed_l2", s.closed_l2},
            {"cr_l2", s.residuals.cr_l2},
            {"cr_max", s.residuals.cr_max},
            {"closed_l2", s.residuals.closed_l2},
            {"closed_max", s.residuals.closed_max},
            {"boundary_defect", s.boundary_defect},
            {"energy", s.energy},
            {"action_plus", s.action_plus},
            {"action_minus", s.action_minus},
            {"action_gap", s.action_gap},
            {"defect", s.defect},
            {"T_H_plus", s.plus.T_H},
            {"T_H_minus", s.minus.T_H},
            {"Q_H_plus", s.plus.Q_H},
            {"Q_H_minus", s.minus.Q_H},
            {"chord_T_plus", s.chord_T_plus},
            {"chord_T_minus", s.chord_T_minus}};
}

SuiteResult suite_energy_action(Context& cx) {
    const RunConfig& c = cx.cfg;
    const SolveResult& sr = solved(cx);
    const SolveReport& s = sr.report;
    ResidualReport rep;
    const double res = std::max(s.cr_l2, s.closed_l2);
    auto& conv = rep.add("solver_residual", res, res, c.tolerance("solver_residual"));
    conv.pass = conv.pass && s.converged();
    rep.add("energy_action_defect", s.defect, s.defect, c.tolerance("energy_action"));
    SuiteResult r;
    r.name = "energy_action";
    r.pass = rep.all_pass();
    r.data["entries"] = report_rows(rep, &c.solver.grid);
    r.data["solve"] = solve_summary(s);
    return r;
}

SuiteResult suite_asymptotics(Context& cx) {
    const RunConfig& c = cx.cfg;
    const SolveResult& sr = solved(cx);
    const ContactIsotopy iso(cx.chart, c.H, c.solver.isotopy_steps);
    const AsymptoticDiagnostics dg = asymptotic_diagnostics(cx.chart, iso, sr.field, c.solver.R0, 5, c.tolerance("chord_fit"));
    ResidualReport rep;
    const double fit = std::max(dg.plus.fit_error, dg.minus.fit_error);
    const double q = std::max(std::abs(dg.plus.Q_H), std::abs(dg.minus.Q_H));
    rep.add("chord_fit_error", fit, fit, c.tolerance("chord_fit"));
    rep.add("charge", q, q, c.tolerance("charge"));
    rep.add("charge_drift", dg.Q_drift, dg.Q_drift, c.tolerance("charge"));
    const double tgap = std::max(std::abs(dg.plus.T - dg.plus.T_H), std::abs(dg.minus.T - dg.minus.T_H));
    rep.add("fitted_T_vs_T_H", tgap, tgap, c.tolerance("chord_fit"));
    SuiteResult r;
    r.name = "asymptotics";
    r.pass = rep.all_pass() && sr.report.converged();
    r.data["solver_status"] = sr.report.status;
    r.data["entries"] = report_rows(rep, &c.solver.grid);
    json seq = json::array();
    for (const auto& f : dg.sequence)
        seq.push_back({{"row", f.row}, {"tau", f.tau}, {"fit_error", f.fit_error}, {"T", f.T}, {"T_H", f.T_H}, {"Q_H", f.Q_H}});
    r.data["sequence"] = seq;
    return r;
}

SuiteResult dispatch(Context& cx, const std::string& name) {
    if (name == "triad") return suite_triad(cx);
    if (name == "flow") return suite_flow(cx);
    if (name == "action_identity") return suite_action_identity(cx);
    if (name == "first_variation") return suite_first_variation(cx);
    if (name == "lifting") return suite_lifting(cx);
    if (name == "gauge") return suite_gauge(cx);
    if (name == "energy_action") return suite_energy_action(cx);
    if (name == "asymptotics") return suite_asymptotics(cx);
    return suite_validator(cx, name);
}

SuiteResult timed(Context& cx, const std::string& name) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = dispatch(cx, name);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---- output ----

std::string csv_number(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_string()) return v.get<std::string>();
    std::ostringstream os;
    os << std::setprecision(12) << v.get<double>();
    return os.str();
}

void write_rows_csv(const fs::path& file, const json& rows, const std::vector<std::string>& cols) {
    std::ofstream os(file);
    if (!os) throw Error("cannot write " + file.string());
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << (r.contains(cols[i]) ? csv_number(r[cols[i]]) : "");
        os << '\n';
    }
}

void write_json(const fs::path& file, const json& j) {
    std::ofstream os(file);
    if (!os) throw Error("cannot write " + file.string());
    os << j.dump(2) << '\n';
}

json family_of(json cfg) {
    for (const char* k : {"grid", "refine", "output", "suites"}) cfg.erase(k);
    return cfg;
}

}  // namespace

json report_rows(const ResidualReport& r, const StripGrid* grid, int level) {
    json rows = json::array();
    for (const auto& e : r.entries) {
        json row = entry_row(e);
        row["level"] = level;
        if (grid) {
            row["M"] = grid->M;
            row["N"] = grid->N;
            row["h"] = grid->spacing();
        }
        rows.push_back(row);
    }
    return rows;
}

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw SchemaError("/", "config must be a JSON object");
    RunConfig c;
    c.source = doc;
    if (const json* m = member(doc, "manifold", "", false)) {
        const std::string type = string(*m, "type", "/manifold", "standard");
        if (type != "standard" && type != "standard_r2np1") throw SchemaError("/manifold/type", "only the standard triad is available");
        c.n = integer(*m, "n", "/manifold", 1, 1, kMaxN);
    }
    const TriadChart chart(c.n);
    c.H = parse_hamiltonian(*member(doc, "hamiltonian", "", true), "/hamiltonian", c.n, c.hamiltonian_label);

    if (const json* g = member(doc, "grid", "", false)) {
        const double a = number(*g, "tau0", "/grid", -1.0), b = number(*g, "tau1", "/grid", 1.0);
        if (!(b > a)) throw SchemaError("/grid/tau1", "must exceed tau0");
        c.grid = StripGrid(a, b, integer(*g, "M", "/grid", 16, 4, 4096), integer(*g, "N", "/grid", 8, 4, 4096));
    }
    if (const json* p = member(doc, "paths", "", false)) {
        c.path_N = integer(*p, "N", "/paths", 200, 8, 100000);
        c.path_count = integer(*p, "count", "/paths", 20, 1, 10000);
    }
    c.refine = integer(doc, "refine", "", 3, 1, 6);
    if (const json* v = member(doc, "seed", "", false)) {
        if (!v->is_number_integer() || v->get<long long>() < 0 || v->get<long long>() > 0xffffffffLL)
            throw SchemaError("/seed", "expected a non-negative integer");
        c.seed = v->get<unsigned>();
    }
    c.output = string(doc, "output", "", c.output.string());
    if (const json* s = member(doc, "suites", "", false)) {
        if (!s->is_array()) throw SchemaError("/suites", "expected an array of suite names");
        std::vector<std::string> names;
        for (std::size_t i = 0; i < s->size(); ++i) {
            if (!(*s)[i].is_string()) throw SchemaError("/suites/" + std::to_string(i), "expected a string");
            names.push_back((*s)[i].get<std::string>());
        }
        c.suites = names;
    }
    const auto expanded = expand_suites(c.suites);
    for (std::size_t i = 0; i < expanded.size(); ++i)
        if (std::find(suite_names().begin(), suite_names().end(), expanded[i]) == suite_names().end())
            throw SchemaError("/suites", "unknown suite '" + expanded[i] + "'");
    if (const json* t = member(doc, "tolerances", "", false)) {
        if (!t->is_object()) throw SchemaError("/tolerances", "expected an object");
        const RunConfig probe;
        for (auto it = t->begin(); it != t->end(); ++it) {
            try {
                (void)probe.tolerance(it.key());
            } catch (const std::out_of_range&) {
                throw SchemaError("/tolerances/" + it.key(), "unknown tolerance");
            }
            c.tolerances[it.key()] = number(*t, it.key(), "/tolerances", 0.0, true);
        }
    }
    c.parallel_suites = member(doc, "parallel_suites", "", false) && doc["parallel_suites"].is_boolean() &&
                        doc["parallel_suites"].get<bool>();

    SolveConfig& s = c.solver;
    s.H = c.H;
    s.grid = StripGrid(-1.0, 1.0, 64, 32);
    s.R0 = x_plane(chart, 0.0);
    s.R1 = x_plane(chart, 1.0);
    s.anchor_minus = Vec::Constant(c.n, 0.2);
    s.anchor_plus = Vec::Constant(c.n, 0.2);
    s.rng_seed = c.seed;
    if (const json* so = member(doc, "solver", "", false)) {
        const std::string P = "/solver";
        if (!so->is_object()) throw SchemaError(P, "expected an object");
        const double a = number(*so, "tau0", P, -1.0), b = number(*so, "tau1", P, 1.0);
        if (!(b > a)) throw SchemaError(P + "/tau1", "must exceed tau0");
        s.grid = StripGrid(a, b, integer(*so, "M", P, 64, 4, 4096), integer(*so, "N", P, 32, 4, 4096));
        s.max_iterations = integer(*so, "max_iterations", P, s.max_iterations, 0, 1000000);
        s.target_residual = number(*so, "target_residual", P, s.target_residual, true);
        s.perturbation = number(*so, "perturbation", P, s.perturbation);
        s.initial_step = number(*so, "initial_step", P, s.initial_step, true);
        if (const json* pc = member(*so, "precondition", P, false)) {
            if (!pc->is_boolean()) throw SchemaError(P + "/precondition", "expected a boolean");
            s.precondition = pc->get<bool>();
        }
        const std::string seed = string(*so, "seed_strategy", P, "linear_chords");
        if (seed == "linear_chords") s.seed = SeedStrategy::LinearChords;
        else if (seed == "gauge_transformed") s.seed = SeedStrategy::GaugeTransformed;
        else throw SchemaError(P + "/seed_strategy", "expected linear_chords or gauge_transformed");
        if (const json* v = member(*so, "anchor_minus", P, false)) s.anchor_minus = vector_of(*v, P + "/anchor_minus", c.n);
        if (const json* v = member(*so, "anchor_plus", P, false)) s.anchor_plus = vector_of(*v, P + "/anchor_plus", c.n);
        if (const json* v = member(*so, "R0", P, false)) s.R0 = parse_legendrian(*v, P + "/R0", chart);
        if (const json* v = member(*so, "R1", P, false)) s.R1 = parse_legendrian(*v, P + "/R1", chart);
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config " + path.string());
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig default_config() { return parse_config(json{{"hamiltonian", {{"kind", "zero"}}}}); }

std::string config_hash(const json& doc) {
    const std::string s = doc.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
    Context cx{cfg, TriadChart(cfg.n), std::nullopt};
    return timed(cx, name);
}

int run(const RunConfig& cfg, RunManifest* out) {
    const auto suites = expand_suites(cfg.suites);
    fs::create_directories(cfg.output);
    std::vector<SuiteResult> results;
    std::map<std::string, SolveResult> solves;
    if (cfg.parallel_suites) {
        // Solver suites share one solve, so they stay on one task.
        std::vector<std::future<std::vector<SuiteResult>>> tasks;
        std::vector<std::string> solo, shared;
        for (const auto& s : suites) (s == "energy_action" || s == "asymptotics" ? shared : solo).push_back(s);
        for (const auto& s : solo)
            tasks.push_back(std::async(std::launch::async, [&cfg, s] { return std::vector<SuiteResult>{run_suite(s, cfg)}; }));
        Context cx{cfg, TriadChart(cfg.n), std::nullopt};
        std::vector<SuiteResult> sh;
        for (const auto& s : shared) sh.push_back(timed(cx, s));
        std::map<std::string, SuiteResult> by_name;
        for (auto& t : tasks)
            for (auto& r : t.get()) by_name[r.name] = std::move(r);
        for (auto& r : sh) by_name[r.name] = std::move(r);
        for (const auto& s : suites) results.push_back(std::move(by_name.at(s)));
        if (cx.solved) solves.emplace("solve", std::move(*cx.solved));
    } else {
        Context cx{cfg, TriadChart(cfg.n), std::nullopt};
        for (const auto& s : suites) results.push_back(timed(cx, s));
        if (cx.solved) solves.emplace("solve", std::move(*cx.solved));
    }

    json doc = cfg.source;
    doc["seed"] = cfg.seed;
    doc["refine"] = cfg.refine;
    doc["suites"] = suites;
    RunManifest m;
    m.pass = true;
    m.manifest = {{"artifact_version", kArtifactVersion},
                  {"schema", kManifestSchema},
                  {"config", doc},
                  {"config_hash", config_hash(doc)},
                  {"family_hash", config_hash(family_of(doc))},
                  {"seed", cfg.seed},
                  {"hamiltonian", cfg.hamiltonian_label},
                  {"n", cfg.n},
                  {"grid", {{"tau0", cfg.grid.tau0}, {"tau1", cfg.grid.tau1}, {"M", cfg.grid.M}, {"N", cfg.grid.N}}}};
    json suites_json = json::array();
    json timing = {{"suites", json::object()}};
    double total = 0.0;
    const std::vector<std::string> cols{"level", "M", "N", "h", "family", "entry", "l2", "max", "order", "tolerance", "pass"};
    for (const auto& r : results) {
        json s = r.data;
        s["name"] = r.name;
        s["pass"] = r.pass;
        s["seed"] = cfg.seed;
        suites_json.push_back(s);
        timing["suites"][r.name] = r.seconds;
        total += r.seconds;
        m.pass = m.pass && r.pass;
        write_rows_csv(cfg.output / (r.name + ".csv"), r.data.value("entries", json::array()), cols);
    }
    m.manifest["suites"] = suites_json;
    m.manifest["pass"] = m.pass;
    timing["total"] = total;
    m.timing = timing;

    if (auto it = solves.find("solve"); it != solves.end()) {
        const SolveResult& sr = it->second;
        std::ofstream csv(cfg.output / "solution.csv");
        write_field_csv(csv, sr.field);
        std::ofstream bin(cfg.output / "solution.ctnf", std::ios::binary);
        write_field_binary(bin, sr.field);
        std::ofstream it_csv(cfg.output / "iterations.csv");
        write_iteration_csv(it_csv, sr.report);
    }
    write_json(cfg.output / "manifest.json", m.manifest);
    write_json(cfg.output / "timing.json", m.timing);
    if (out) *out = m;
    return m.pass ? 0 : 1;
}

ReportTables report(const fs::path& dir) {
    ReportTables t;
    t.convergence = json::array();
    t.pass_matrix = json::array();
    std::vector<fs::path> files;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        t.warnings.push_back("not a directory: " + dir.string());
        return t;
    }
    if (fs::exists(dir / "manifest.json")) files.push_back(dir / "manifest.json");
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_directory() && fs::exists(e.path() / "manifest.json")) files.push_back(e.path() / "manifest.json");
    std::sort(files.begin(), files.end());
    if (files.empty()) t.warnings.push_back("no manifests under " + dir.string());

    struct Point {
        double h, max;
        std::string source;
    };
    std::map<std::tuple<std::string, std::string, std::string, std::string, std::string>, std::vector<Point>> groups;
    for (const auto& f : files) {
        json m;
        try {
            std::ifstream is(f);
            m = json::parse(is);
        } catch (const std::exception& e) {
            t.warnings.push_back("skipping corrupt manifest " + f.string());
            continue;
        }
        if (!m.is_object() || !m.contains("suites") || !m["suites"].is_array()) {
            t.warnings.push_back("skipping manifest without suites: " + f.string());
            continue;
        }
        const std::string version =
            m.value("artifact_version", std::string("unknown")) + "/schema" + std::to_string(m.value("schema", 0));
        const std::string family = m.value("family_hash", std::string());
        const std::string rel = fs::relative(f.parent_path(), dir, ec).string();
        for (const auto& s : m["suites"]) {
            const std::string suite = s.value("name", std::string("?"));
            t.pass_matrix.push_back({{"manifest", rel}, {"version", version}, {"suite", suite}, {"pass", s.value("pass", false)}});
            if (!s.contains("entries") || !s["entries"].is_array()) continue;
            for (const auto& e : s["entries"]) {
                if (!e.contains("h") || !e["h"].is_number() || !e.contains("max") || !e["max"].is_number()) continue;
                const std::string fam = e.value("family", std::string());
                groups[{version, family, suite, fam, e.value("entry", std::string())}].push_back(
                    {e["h"].get<double>(), e["max"].get<double>(), rel});
            }
        }
    }
    for (auto& [key, pts] : groups) {
        std::stable_sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.h > b.h; });
        std::vector<Point> uniq;
        for (const auto& p : pts)
            if (uniq.empty() || std::abs(uniq.back().h - p.h) > 1e-12 * p.h) uniq.push_back(p);
        for (std::size_t k = 0; k < uniq.size(); ++k) {
            json row{{"version", std::get<0>(key)}, {"suite", std::get<2>(key)}, {"family", std::get<3>(key)},
                     {"entry", std::get<4>(key)}, {"h", uniq[k].h}, {"max", uniq[k].max}, {"source", uniq[k].source}};
            row["order"] = nullptr;
            if (k > 0 && uniq[k].max > 0.0 && uniq[k - 1].max > 0.0)
                row["order"] = std::log(uniq[k - 1].max / uniq[k].max) / std::log(uniq[k - 1].h / uniq[k].h);
            t.convergence.push_back(row);
        }
    }
    return t;
}

void write_report(const ReportTables& t, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    write_rows_csv(out_dir / "convergence.csv", t.convergence,
                   {"version", "suite", "family", "entry", "h", "max", "order", "source"});
    write_rows_csv(out_dir / "pass_matrix.csv", t.pass_matrix, {"manifest", "version", "suite", "pass"});
    write_json(out_dir / "report.json", {{"convergence", t.convergence}, {"pass_matrix", t.pass_matrix}, {"warnings", t.warnings}});
}

}  // namespace contacton
