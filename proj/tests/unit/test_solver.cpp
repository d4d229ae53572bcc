#include "contacton/families.hpp"
#include "contacton/solver.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace contacton;
using test::vec;

namespace {

SolveConfig trivial_config(const TriadChart& c, const HamiltonianSpec& H, int M, int N) {
    SolveConfig cfg;
    cfg.grid = StripGrid(-1, 1, M, N);
    cfg.R0 = x_plane(c, 0.0);
    cfg.R1 = x_plane(c, 1.0);
    cfg.H = H;
    cfg.anchor_minus = vec({0.2});
    cfg.anchor_plus = vec({0.2});
    return cfg;
}

}  // namespace

TEST_SUITE("instanton_solver") {

TEST_CASE("trivial chord converges to the Reeb strip") {
    TriadChart c(1);
    const SolveConfig cfg = trivial_config(c, HamiltonianSpec::zero(1), 32, 16);
    const SolveResult r = solve(c, cfg);
    const SolveReport& s = r.report;
    CHECK(s.converged());
    CHECK(s.residuals.cr_l2 < 1e-5);
    CHECK(s.residuals.closed_l2 < 1e-5);
    CHECK(s.energy < 1e-6);
    CHECK(s.boundary_defect < 1e-12);
    CHECK(s.defect == doctest::Approx(std::abs(s.energy - s.action_gap)));
    CHECK(s.objective_initial > s.objective);
    for (std::size_t k = 1; k < s.history.size(); ++k) CHECK(s.history[k].objective <= s.history[k - 1].objective);
    for (int i = 0; i <= cfg.grid.M; ++i)
        for (int j = 0; j <= cfg.grid.N; ++j)
            CHECK((r.field.at(i, j) - vec({0.2, 0, cfg.grid.t(j)})).norm() < 1e-6);

    std::ostringstream os;
    write_iteration_csv(os, s);
    const std::string text = os.str();
    CHECK(text.rfind("iter,objective,cr_l2,closed_l2,step\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == s.history.size() + 1);
}

TEST_CASE("chord fits on a converged run") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::constant(1, 0.5);
    const SolveConfig cfg = trivial_config(c, H, 32, 16);
    const SolveResult r = solve(c, cfg);
    REQUIRE(r.report.converged());
    const ContactIsotopy iso(c, H, cfg.isotopy_steps);
    const AsymptoticDiagnostics d = asymptotic_diagnostics(c, iso, r.field, cfg.R0);
    for (const ChordFit* f : {&d.plus, &d.minus}) {
        CHECK(f->ok);
        CHECK(f->fit_error < 1e-3);
        CHECK(std::abs(f->T - f->T_H) < 1e-4);
        CHECK(f->T == doctest::Approx(1.5).epsilon(1e-6));
        CHECK(std::abs(f->Q_H) < 1e-5);
    }
    CHECK(d.Q_drift < 1e-4);
    REQUIRE(d.sequence.size() >= 2);
    for (std::size_t k = 1; k < d.sequence.size(); ++k) {
        CHECK(d.sequence[k].tau > d.sequence[k - 1].tau);
        CHECK(d.sequence[k].fit_error <= d.sequence[k - 1].fit_error + 1e-8);
    }
}

TEST_CASE("degenerate constant solution") {
    TriadChart c(1);
    SolveConfig cfg = trivial_config(c, HamiltonianSpec::zero(1), 16, 8);
    cfg.R1 = x_plane(c, 0.0);
    const SolveResult r = solve(c, cfg);
    REQUIRE(r.report.converged());
    const ContactIsotopy iso(c, cfg.H, 10);
    const ChordFit f = fit_chord_slice(c, iso, r.field, cfg.R0, cfg.grid.M);
    CHECK(f.ok);
    CHECK(std::abs(f.T) < 1e-6);
    CHECK(std::abs(f.Q_H) < 1e-6);
}

TEST_CASE("perturbed and gauge-transformed unperturbed solutions agree") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::constant(1, 0.5);
    const ContactIsotopy iso(c, H, 1000);
    const SolveResult u = solve(c, trivial_config(c, H, 32, 16));

    SolveConfig flat = trivial_config(c, HamiltonianSpec::zero(1), 32, 16);
    flat.R0 = transport_legendrian(iso, flat.R0, 0.0, 1.0);
    flat.rng_seed = 5;
    const SolveResult ubar = solve(c, flat);
    REQUIRE(u.report.converged());
    REQUIRE(ubar.report.converged());
    const MapField pushed = gauge_transform(iso, ubar.field, GaugeDirection::ToPerturbed);
    double diff = 0.0;
    for (std::size_t k = 0; k < pushed.u.size(); ++k) diff = std::max(diff, (pushed.u[k] - u.field.u[k]).norm());
    CHECK(diff < 1e-4);
}

TEST_CASE("gauge-transformed seed") {
    TriadChart c(1);
    SolveConfig cfg = trivial_config(c, HamiltonianSpec::linear_z(1), 32, 16);
    cfg.seed = SeedStrategy::GaugeTransformed;
    const SolveResult r = solve(c, cfg);
    CHECK(r.report.converged());
    CHECK(r.report.residuals.cr_l2 < 1e-5);
}

TEST_CASE("infeasible boundary data leaves a residual floor") {
    TriadChart c(1);
    SolveConfig cfg = trivial_config(c, HamiltonianSpec::zero(1), 16, 8);
    cfg.anchor_minus = vec({0.0});
    cfg.anchor_plus = vec({0.5});
    cfg.max_iterations = 200;
    const SolveResult r = solve(c, cfg);
    CHECK_FALSE(r.report.converged());
    CHECK(r.report.objective > 1e-3);
    CHECK(r.report.boundary_defect < 1e-12);
}

TEST_CASE("invalid inputs") {
    TriadChart c(1);
    SolveConfig far = trivial_config(c, HamiltonianSpec::zero(1), 16, 8);
    far.R1 = LegendrianSpec::affine(c, vec({5, 0, 0}), (Mat(3, 1) << 0, 1, 0).finished());
    CHECK_THROWS_AS(solve(c, far), Error);
    SolveConfig mixed = trivial_config(c, HamiltonianSpec::expression(1, "x*z", {"z", "0", "x"}, "x"), 16, 8);
    CHECK_THROWS_AS(solve(c, mixed), Error);
    SolveConfig dims = trivial_config(c, HamiltonianSpec::zero(1), 16, 8);
    dims.anchor_plus = vec({0.1, 0.2});
    CHECK_THROWS_AS(solve(c, dims), DimensionError);
}

}
