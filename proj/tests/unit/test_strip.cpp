#include "contacton/families.hpp"
#include "contacton/report.hpp"
#include "contacton/strip.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace contacton;
using test::vec;

TEST_SUITE("instanton_fields") {

TEST_CASE("constant map has vanishing fields") {
    TriadChart c(1);
    const MapField u = MapField::sample(StripGrid(0, 1, 8, 8), 1, [](double, double) { return vec({0.3, 0.2, 0.1}); });
    const DHFields f = assemble_dH(c, HamiltonianSpec::zero(1), u);
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        CHECK(f.dH.on_tau[k].norm() < 1e-14);
        CHECK(f.dH.on_t[k].norm() < 1e-14);
        CHECK(std::abs(f.lambdaH[k][0]) < 1e-14);
        CHECK(std::abs(f.lambdaH[k][1]) < 1e-14);
    }
}

TEST_CASE("pull-back of lambda_H for (tau, t, a)") {
    TriadChart c(1);
    const MapField u = MapField::sample(StripGrid(0, 1, 16, 16), 1, [](double s, double t) {
        return vec({s, t, s * s * t});
    });
    const DHFields f = assemble_dH(c, HamiltonianSpec::zero(1), u);
    // lambda(u_tau) = a_tau - t, lambda(u_t) = a_t
    for (int i = 0; i <= 16; ++i)
        for (int j = 0; j <= 16; ++j) {
            const double s = u.grid.tau(i), t = u.grid.t(j);
            const int k = u.grid.index(i, j);
            CHECK(f.lambdaH[k][0] == doctest::Approx(2 * s * t - t).epsilon(1e-10));
            CHECK(f.lambdaH[k][1] == doctest::Approx(s * s).epsilon(1e-10));
        }
}

TEST_CASE("Cauchy-Riemann residual") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const StripGrid g(0, 1, 32, 32);
    const MapField holo = MapField::sample(g, 1, [](double s, double t) { return vec({s, t, std::exp(s) * std::cos(t)}); });
    CHECK(cr_residual(c, H, holo).norms.max < 1e-12);
    const MapField anti = MapField::sample(g, 1, anti_holomorphic_map(1));
    CHECK(cr_residual(c, H, anti).norms.max == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("closedness residual") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const ContactIsotopy id(c, H, 10);
    std::vector<double> harmonic;
    for (int M : {16, 32}) {
        const StripGrid g(0, 1, M, M);
        const MapField strip = MapField::sample(g, 1, reeb_strip(vec({0.2}), 1.5));
        CHECK(closedness_residual(c, H, id, strip).norms.max < 1e-12);
        const MapField h = MapField::sample(g, 1, [](double s, double t) { return vec({s, t, std::exp(s) * std::cos(t)}); });
        harmonic.push_back(closedness_residual(c, H, id, h).norms.max);
        const MapField nh = MapField::sample(g, 1, non_harmonic_lift(1));
        CHECK(closedness_residual(c, H, id, nh).norms.max == doctest::Approx(2.0).epsilon(1e-6));
    }
    CHECK(harmonic[1] < 1e-3);
    CHECK(observed_order(harmonic[0], harmonic[1]) >= 1.8);
}

TEST_CASE("pi-energy") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const ContactIsotopy id(c, H, 10);
    const MapField u = MapField::sample(StripGrid(0, 1, 16, 16), 1, [](double s, double t) { return vec({s, t, s * t}); });
    CHECK(pi_energy(c, H, id, u) == doctest::Approx(1.0).epsilon(1e-12));
    const MapField strip = MapField::sample(StripGrid(0, 1, 16, 16), 1, reeb_strip(vec({0.2}), 1.5));
    CHECK(std::abs(pi_energy(c, H, id, strip)) < 1e-14);
}

TEST_CASE("gauge transform of a Reeb strip under H = c") {
    TriadChart c(1);
    const double cc = 0.6, T = 1.2;
    const auto H = HamiltonianSpec::constant(1, cc);
    const ContactIsotopy iso(c, H, 1000);
    const MapField u = MapField::sample(StripGrid(0, 1, 8, 8), 1, reeb_strip(vec({0.3}), T));
    const MapField ubar = gauge_transform(iso, u, GaugeDirection::ToUnperturbed);
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
            const double t = u.grid.t(j);
            CHECK((ubar.at(i, j) - vec({0.3, 0, T * t + cc * t - cc})).norm() < 1e-12);
        }
    const MapField back = gauge_transform(iso, ubar, GaugeDirection::ToPerturbed);
    for (std::size_t k = 0; k < u.u.size(); ++k) CHECK((back.u[k] - u.u[k]).norm() < 1e-12);
}

TEST_CASE("gauge round trip for H = z") {
    TriadChart c(1);
    const ContactIsotopy iso(c, HamiltonianSpec::linear_z(1), 1000);
    const MapField u = MapField::sample(StripGrid(-1, 1, 8, 8), 1, default_holomorphic_lift(1));
    const MapField back = gauge_transform(iso, gauge_transform(iso, u, GaugeDirection::ToUnperturbed), GaugeDirection::ToPerturbed);
    for (std::size_t k = 0; k < u.u.size(); ++k) CHECK((back.u[k] - u.u[k]).norm() < 1e-10);
}

TEST_CASE("gauge equivalence of residuals") {
    TriadChart c(1);
    const MapField u = MapField::sample(StripGrid(-1, 1, 16, 8), 1, default_holomorphic_lift(1));
    {
        const auto H = HamiltonianSpec::zero(1);
        const GaugeEquivalence ge = gauge_equivalence_check(c, H, ContactIsotopy(c, H, 10), u);
        CHECK(ge.perturbed.cr_max == ge.unperturbed.cr_max);
        CHECK(ge.perturbed.closed_max == ge.unperturbed.closed_max);
        CHECK(ge.energy_perturbed == ge.energy_unperturbed);
    }
    const auto H = HamiltonianSpec::constant(1, 0.5);
    const ContactIsotopy iso(c, H, 1000);
    std::vector<double> cr;
    for (int M : {16, 32}) {
        const MapField v = gauge_transformed(iso, StripGrid(-1, 1, M, M / 2), default_holomorphic_lift(1));
        const GaugeEquivalence ge = gauge_equivalence_check(c, H, iso, v);
        CHECK(std::abs(ge.energy_perturbed - ge.energy_unperturbed) < 1e-8);
        cr.push_back(ge.perturbed.closed_max);
    }
    CHECK(cr[1] < cr[0]);
}

TEST_CASE("asymptotic action and charge of a Reeb strip") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::zero(1);
    const ContactIsotopy id(c, H, 10);
    const MapField u = MapField::sample(StripGrid(-1, 1, 16, 8), 1, reeb_strip(vec({0.3}), 1.7));
    const ActionCharge ac = asymptotic_action_charge(c, H, id, u, 0.5);
    CHECK(ac.T_H == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(std::abs(ac.Q_H) < 1e-12);
    CHECK(std::abs(ac.energy) < 1e-12);
}

TEST_CASE("charge is slice independent on an exact instanton") {
    // Legendrian boundary rows make the boundary flux of the closed form vanish.
    TriadChart c(1);
    const ContactIsotopy iso(c, HamiltonianSpec::constant(1, 0.5), 1000);
    for (int M : {16, 32}) {
        const MapField u = gauge_transformed(iso, StripGrid(-1, 1, M, M), legendrian_lift(), legendrian_lift_R0(c),
                                             legendrian_lift_R1(c));
        CHECK(u.boundary_defect() < 1e-10);
        const double q0 = asymptotic_action_charge(c, iso.hamiltonian(), iso, u, -0.5).Q_H;
        const double q1 = asymptotic_action_charge(c, iso.hamiltonian(), iso, u, 0.5).Q_H;
        CHECK(std::abs(q0 - q1) < 1e-10);
    }
}

TEST_CASE("field serialization") {
    const MapField u = MapField::sample(StripGrid(-1, 1, 6, 4), 1, default_holomorphic_lift(1));
    std::stringstream csv;
    write_field_csv(csv, u);
    const MapField a = read_field_csv(csv, 1);
    CHECK(a.grid.M == 6);
    CHECK(a.grid.N == 4);
    for (std::size_t k = 0; k < u.u.size(); ++k) CHECK((a.u[k] - u.u[k]).norm() < 1e-15);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_field_binary(bin, u);
    const MapField b = read_field_binary(bin);
    CHECK(b.grid.tau0 == -1.0);
    for (std::size_t k = 0; k < u.u.size(); ++k) CHECK((b.u[k] - u.u[k]).norm() == 0.0);

    std::string bytes;
    {
        std::stringstream s2(std::ios::in | std::ios::out | std::ios::binary);
        write_field_binary(s2, u);
        bytes = s2.str();
    }
    bytes[0] = 'X';
    std::stringstream bad(bytes, std::ios::in | std::ios::binary);
    CHECK_THROWS_AS(read_field_binary(bad), Error);
}

}
