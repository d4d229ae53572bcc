#include "contacton/families.hpp"
#include "contacton/validators.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace contacton;
using test::vec;

namespace {

double order_of(const std::vector<ConvergenceLevel>& lv, const std::string& entry) {
    const auto& e = lv.back().report.at(entry);
    REQUIRE(e.order.has_value());
    return *e.order;
}

}  // namespace

TEST_SUITE("identity_validators") {

TEST_CASE("on-shell orders on the holomorphic lift") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const ContactIsotopy id(c, H, 10);
    const StripGrid base(-1, 1, 16, 8);
    auto field = [](const StripGrid& g) { return MapField::sample(g, 1, default_holomorphic_lift(1)); };

    const auto fund = refinement_study([&](const StripGrid& g) { return fundamental_equation_residual(c, H, field(g)); }, base, 3);
    CHECK(order_of(fund, "fundamental") >= 0.9);
    const auto dl = refinement_study([&](const StripGrid& g) { return du_lambdaH_residual(c, H, field(g)); }, base, 3);
    CHECK(order_of(dl, "du_lambdaH") >= 1.8);
    const auto iso = refinement_study([&](const StripGrid& g) { return isothermal_system_residual(c, H, id, field(g)); }, base, 3);
    CHECK(order_of(iso, "alpha_dbar") >= 1.8);
    CHECK(order_of(iso, "zeta_B_lambda") >= 1.8);
    const auto wz = refinement_study([&](const StripGrid& g) { return weitzenbock_laplacian_residual(c, H, field(g)); }, base, 3);
    CHECK(order_of(wz, "weitzenbock") >= 0.9);
    CHECK(wz.back().report.at("weitzenbock_vanishing_terms").max < 1e-6);
}

TEST_CASE("Reeb strip satisfies every identity trivially") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const ContactIsotopy id(c, H, 10);
    const MapField u = MapField::sample(StripGrid(-1, 1, 16, 8), 1, reeb_strip(vec({0.3}), 1.0));
    CHECK(fundamental_equation_residual(c, H, u).worst_max() < 1e-10);
    CHECK(du_lambdaH_residual(c, H, u).worst_max() < 1e-10);
    CHECK(isothermal_system_residual(c, H, id, u).worst_max() < 1e-10);
    CHECK(weitzenbock_laplacian_residual(c, H, u).at("weitzenbock").max < 1e-10);
}

TEST_CASE("du lambda_H identity on (tau, t, a)") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    std::vector<double> r;
    for (int M : {16, 32}) {
        const MapField u = MapField::sample(StripGrid(0, 1, M, M), 1, [](double s, double t) {
            return vec({s, t, std::exp(s) * std::sin(t)});
        });
        r.push_back(du_lambdaH_residual(c, H, u).at("du_lambdaH").max);
    }
    CHECK(r[1] < 1e-3);
    CHECK(observed_order(r[0], r[1]) >= 1.8);
}

TEST_CASE("zeta equation needs the inhomogeneous term for H = z") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::linear_z(1);
    const ContactIsotopy iso(c, H, 1000);
    ValidatorOptions opt;
    opt.check_preconditions = false;
    const auto lv = refinement_study(
        [&](const StripGrid& g) {
            const MapField u = MapField::sample(g, 1, linear_z_cr_family(0.4, 0.7, [](Complex w) { return 0.3 * std::cos(w); }));
            return isothermal_system_residual(c, H, iso, u, opt);
        },
        StripGrid(-1, 1, 16, 8), 3);
    const auto& fine = lv.back().report;
    CHECK(fine.at("zeta_B_lambda").pass);
    CHECK(fine.at("zeta_B_lambdaH").pass);
    CHECK(order_of(lv, "zeta_B_lambda") >= 1.8);
    CHECK_FALSE(fine.at("zeta_homogeneous").pass);
    CHECK(fine.at("zeta_homogeneous").max > 1e-3);
}

TEST_CASE("preconditions are enforced") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const ContactIsotopy id(c, H, 10);
    const StripGrid g(-1, 1, 16, 8);
    try {
        fundamental_equation_residual(c, H, MapField::sample(g, 1, anti_holomorphic_map(1)));
        FAIL("expected a precondition failure");
    } catch (const PreconditionError& e) {
        CHECK(e.residual() == "cr_residual");
        CHECK(e.value() > 1e-3);
    }
    try {
        isothermal_system_residual(c, H, id, MapField::sample(g, 1, non_harmonic_lift(1)));
        FAIL("expected a precondition failure");
    } catch (const PreconditionError& e) {
        CHECK(e.residual() == "closedness_residual");
        CHECK(e.value() > 1e-3);
    }
}

TEST_CASE("corrupted connection is detected") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const MapField u = MapField::sample(StripGrid(-1, 1, 32, 16), 1, default_holomorphic_lift(1));
    ValidatorOptions opt;
    opt.connection = [&](const Vec& p) {
        auto G = christoffel_at(c, p);
        G(c.iy(0), c.ix(0), c.iy(0)) += 1e-2;
        return G;
    };
    const double clean = fundamental_equation_residual(c, H, u).at("fundamental").max;
    const double bad = fundamental_equation_residual(c, H, u, opt).at("fundamental").max;
    CHECK(bad > 1e-3);
    CHECK(bad > 10 * clean);
}

TEST_CASE("vector-valued form calculus") {
    const auto lv = refinement_study([](const StripGrid& g) { return vector_form_calculus_check(g, 7); },
                                     StripGrid(-1, 1, 16, 16), 3);
    CHECK(order_of(lv, "metric_property_pointwise") >= 1.8);
    CHECK(order_of(lv, "dnabla_two_assemblies") >= 1.8);
}

}
