#include "contacton/dynamics.hpp"
#include "contacton/families.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace contacton;
using test::vec;

namespace {

HamiltonianSpec mixed_expression() {
    return HamiltonianSpec::expression(1, "x*y + 0.3*sin(t)*z", {"y", "x", "0.3*sin(t)"}, "0.3*sin(t)");
}

// gamma' = X_H + f R for H = c in closed form: x, y fixed, z' = -c + a + b sin(pi t).
PathGamma constant_H_critical_path(double c, const Vec& p0, double a, double b, int N) {
    return PathGamma::sample(1, N, [&](double t) {
        Vec p = p0;
        p(2) += (a - c) * t + b * (1.0 - std::cos(M_PI * t)) / M_PI;
        return p;
    });
}

}  // namespace

TEST_SUITE("contact_dynamics") {

TEST_CASE("contact vector fields") {
    TriadChart c(1);
    const Vec p = vec({1, 2, 3});
    CHECK(contact_field(c, HamiltonianSpec::zero(1), 0.0, p).norm() == 0.0);
    CHECK((contact_field(c, HamiltonianSpec::constant(1, 0.7), 0.0, p) - vec({0, 0, -0.7})).norm() < 1e-15);
    CHECK((contact_field(c, HamiltonianSpec::linear_z(1), 0.0, p) - vec({0, -2, -3})).norm() < 1e-15);
    // the linear solve agrees with the closed form, and lambda(X) = -H
    std::mt19937 rng(1);
    for (const auto& H : {HamiltonianSpec::linear_z(1), mixed_expression()}) {
        for (int k = 0; k < 5; ++k) {
            const Vec q = test::random_vec(3, rng, 2.0);
            const double t = 0.37;
            const Vec X = hamiltonian_vector_field(c, H, t, q);
            CHECK((X - contact_field(c, H, t, q)).norm() < 1e-12);
            CHECK(c.lambda(q, X) == doctest::Approx(-H.H(t, q)));
        }
    }
}

TEST_CASE("flow of H = z matches the closed form") {
    TriadChart c(1);
    const ContactIsotopy iso(c, HamiltonianSpec::linear_z(1), 1000);
    const Vec p = vec({1, 2, 3});
    const FlowResult f = iso.transport(p, 0.0, 1.0, true);
    const Vec exact = vec({1, 2 * std::exp(-1.0), 3 * std::exp(-1.0)});
    CHECK((f.point - exact).norm() < 1e-9);
    CHECK(std::abs(f.g + 1.0) < 1e-9);
    const FlowResult cf = linear_z_flow(c, p, 0.0, 1.0);
    CHECK((cf.point - exact).norm() < 1e-15);
    CHECK((f.D - cf.D).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("constant Hamiltonians translate along z") {
    TriadChart c(1);
    const double cc = 0.8;
    const ContactIsotopy iso(c, HamiltonianSpec::constant(1, cc), 200);
    const Vec p = vec({0.3, -0.4, 1.1});
    for (double t : {0.25, 0.5, 1.0}) {
        const Vec q = iso.psi(t, p);
        CHECK((q - (p - vec({0, 0, cc * t}))).norm() < 1e-12);
        CHECK(std::abs(iso.g_psi(t, p)) < 1e-14);
        CHECK((iso.phi(t, p) - (p + vec({0, 0, cc - cc * t}))).norm() < 1e-12);
    }
    const ContactIsotopy id(c, HamiltonianSpec::zero(1), 50);
    CHECK((id.psi(1.0, p) - p).norm() == 0.0);
}

TEST_CASE("pull-back and inverse identities") {
    TriadChart c(1);
    std::mt19937 rng(2);
    for (const auto& H : {HamiltonianSpec::constant(1, 0.5), HamiltonianSpec::linear_z(1), mixed_expression()}) {
        const ContactIsotopy iso(c, H, 1000);
        for (int k = 0; k < 5; ++k) {
            const Vec p = test::random_vec(3, rng);
            const Vec v = test::random_vec(3, rng);
            CHECK(pullback_residual(iso, 1.0, p, v) < 1e-8);
            CHECK(conformal_exponent_inverse_check(iso, p) < 1e-8);
            CHECK(std::abs(iso.g_Hu(1.0, p)) < 1e-12);
        }
    }
}

TEST_CASE("conformal exponent composition") {
    TriadChart c(1);
    const ContactIsotopy a(c, HamiltonianSpec::linear_z(1), 1000);
    const ContactIsotopy b(c, mixed_expression(), 1000);
    std::mt19937 rng(3);
    for (int k = 0; k < 3; ++k) CHECK(conformal_exponent_composition_check(a, b, test::random_vec(3, rng)) < 1e-8);
}

TEST_CASE("Reeb chords between x-planes") {
    TriadChart c(1);
    const auto R0 = x_plane(c, 0.0), R1 = x_plane(c, 1.0);
    const ReebChord ch0 = find_chord(ContactIsotopy(c, HamiltonianSpec::zero(1), 100), R0, R1, vec({0.2}));
    CHECK(ch0.T == doctest::Approx(1.0));
    const ContactIsotopy iso(c, HamiltonianSpec::constant(1, 0.5), 100);
    const ReebChord ch = find_chord(iso, R0, R1, vec({0.2}));
    CHECK(ch.T == doctest::Approx(1.5));
    CHECK(ch.defect < 1e-8);
    CHECK(R1.distance(ch.at(iso, 1.0)) < 1e-8);
    CHECK(R0.distance(ch.at(iso, 0.0)) < 1e-8);
    // a Legendrian never met by the Reeb orbit
    const auto far = LegendrianSpec::affine(c, vec({5, 0, 0}), (Mat(3, 1) << 0, 1, 0).finished());
    CHECK_THROWS_AS(find_chord(iso, R0, far, vec({0.2})), Error);
}

TEST_CASE("lifting a Reeb chord") {
    TriadChart c(1);
    const double T = 1.3;
    const PathGamma g = PathGamma::sample(1, 64, [&](double t) { return vec({0.4, 0, T * t}); });
    const LiftResult lr = lift_to_hamiltonian_trajectory(c, HamiltonianSpec::zero(1), g);
    CHECK(lr.residual < 1e-12);
    for (int k = 0; k <= 64; ++k) {
        CHECK(lr.rho[k] == doctest::Approx(T * g.t(k)));
        CHECK((lr.tilde_gamma.points[k] - vec({0.4, 0, 0})).norm() < 1e-12);
    }
}

TEST_CASE("lifting critical paths for constant Hamiltonians") {
    TriadChart c(1);
    for (double cc : {0.0, 0.6}) {
        const HamiltonianSpec H = HamiltonianSpec::constant(1, cc);
        const PathGamma g = constant_H_critical_path(cc, vec({0.2, -0.3, 0.1}), 0.7, 0.4, 200);
        const LiftResult lr = lift_to_hamiltonian_trajectory(c, H, g);
        CHECK(lr.pi_residual < 1e-8);
        CHECK(lr.residual < 1e-5);
    }
}

TEST_CASE("lifting rejects non-critical paths") {
    TriadChart c(1);
    PathGamma g = constant_H_critical_path(0.0, vec({0.2, -0.3, 0.1}), 0.7, 0.4, 100);
    for (int k = 0; k <= 100; ++k) g.points[k](1) += 0.05 * std::sin(M_PI * g.t(k));
    try {
        lift_to_hamiltonian_trajectory(c, HamiltonianSpec::zero(1), g);
        FAIL("expected a precondition failure");
    } catch (const PreconditionError& e) {
        CHECK(e.residual().find("pi") != std::string::npos);
        CHECK(e.value() > 1e-2);
    }
}

TEST_CASE("blow-up is reported") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::expression(1, "-z*z", {"0", "0", "-2*z"}, "-2*z");
    const ContactIsotopy iso(c, H, 100, 1e3);
    CHECK_THROWS_AS(iso.transport(vec({0, 0, 10}), 0.0, 1.0), FlowBlowUp);
}

}
