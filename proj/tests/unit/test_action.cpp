#include "contacton/action.hpp"
#include "contacton/families.hpp"
#include "contacton/report.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace contacton;
using test::vec;

namespace {

// Bends a random path so its ends sit on x-planes at heights 0 and 1, and tags it.
PathGamma tagged_path(const TriadChart& c, std::mt19937& rng, int N) {
    PathGamma g = random_path(1, N, rng);
    const auto R0 = x_plane(c, 0.0), R1 = x_plane(c, 1.0);
    const Vec d0 = R0.project(g.points.front()) - g.points.front();
    const Vec d1 = R1.project(g.points.back()) - g.points.back();
    for (int k = 0; k <= N; ++k) g.points[k] += (1.0 - g.t(k)) * d0 + g.t(k) * d1;
    g.R0 = R0;
    g.R1 = R1;
    return g;
}

}  // namespace

TEST_SUITE("action_functional") {

TEST_CASE("action of chords and constant paths") {
    TriadChart c(1);
    const double T = 0.9;
    const PathGamma chord = PathGamma::sample(1, 100, [&](double t) { return vec({0.3, 0, T * t}); });
    const ContactIsotopy id(c, HamiltonianSpec::zero(1), 100);
    CHECK(action_value(c, HamiltonianSpec::zero(1), id, chord) == doctest::Approx(T).epsilon(1e-14));
    CHECK(action_unperturbed(c, chord) == doctest::Approx(T).epsilon(1e-14));

    const PathGamma still = PathGamma::sample(1, 100, [](double) { return vec({0.1, 0.2, 0.3}); });
    CHECK(std::abs(action_value(c, HamiltonianSpec::zero(1), id, still)) < 1e-14);
    const auto H = HamiltonianSpec::constant(1, 0.4);
    const ContactIsotopy iso(c, H, 100);
    CHECK(action_value(c, H, iso, still) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("gauge transform preserves the action") {
    TriadChart c(1);
    {
        std::mt19937 rng(1);
        const PathGamma g = random_path(1, 200, rng);
        const ContactIsotopy id(c, HamiltonianSpec::zero(1), 100);
        CHECK(action_identity_residual(c, HamiltonianSpec::zero(1), id, g) == 0.0);
    }
    for (const auto& H : {HamiltonianSpec::constant(1, 0.5), HamiltonianSpec::linear_z(1)}) {
        const ContactIsotopy iso(c, H, 1000);
        for (int k = 0; k < 5; ++k) {
            std::mt19937 rng(100 + k);
            const PathGamma g = random_path(1, 200, rng);
            CHECK(action_identity_residual(c, H, iso, g) < 1e-5);
        }
    }
}

TEST_CASE("action identity residual decays under refinement") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::linear_z(1);
    const ContactIsotopy iso(c, H, 1000);
    std::vector<double> r;
    for (int N : {20, 40, 80}) {
        std::mt19937 rng(7);
        r.push_back(action_identity_residual(c, H, iso, random_path(1, N, rng)));
    }
    for (std::size_t k = 1; k < r.size(); ++k) CHECK(observed_order(r[k - 1], r[k]) >= 1.8);
}

TEST_CASE("first variation matches difference quotients") {
    TriadChart c(1);
    for (const auto& H : {HamiltonianSpec::zero(1), HamiltonianSpec::linear_z(1)}) {
        const ContactIsotopy iso(c, H, 1000);
        std::mt19937 rng(11);
        const PathGamma g = random_path(1, 200, rng);
        const VariationField eta = random_variation(g, rng);
        const double formula = first_variation(c, H, iso, g, eta).total();
        const double e3 = std::abs(action_difference_quotient(c, H, iso, g, eta, 1e-3) - formula);
        const double e4 = std::abs(action_difference_quotient(c, H, iso, g, eta, 1e-4) - formula);
        CHECK(e3 < 5e-3);
        CHECK(e4 < e3);
    }
}

TEST_CASE("boundary terms vanish for Legendrian-tangent variations") {
    TriadChart c(1);
    const auto H = HamiltonianSpec::constant(1, 0.3);
    const ContactIsotopy iso(c, H, 200);
    std::mt19937 rng(12);
    for (int k = 0; k < 5; ++k) {
        const PathGamma g = tagged_path(c, rng, 100);
        CHECK(g.tag_defect() < 1e-12);
        const VariationField eta = random_variation(g, rng, true);
        const FirstVariation fv = first_variation(c, H, iso, g, eta);
        CHECK(std::abs(fv.boundary_end) < 1e-10);
        CHECK(std::abs(fv.boundary_start) < 1e-10);
    }
}

TEST_CASE("critical paths are stationary") {
    TriadChart c(1);
    const double cc = 0.5;
    const auto H = HamiltonianSpec::constant(1, cc);
    const ContactIsotopy iso(c, H, 200);
    const PathGamma g = PathGamma::sample(1, 200, [&](double t) {
        return vec({0.2, 0.1, -cc * t + 0.6 * t + 0.3 * std::sin(M_PI * t)});
    });
    CHECK(critical_residual(c, H, g) < 1e-6);
    std::mt19937 rng(13);
    const FirstVariation fv = first_variation(c, H, iso, g, random_variation(g, rng));
    CHECK(std::abs(fv.interior) < 1e-8);
}

TEST_CASE("critical residual") {
    TriadChart c(1);
    const PathGamma chord = PathGamma::sample(1, 50, [](double t) { return vec({0.3, 0, 2 * t}); });
    CHECK(critical_residual(c, HamiltonianSpec::zero(1), chord) < 1e-12);
    // Reeb-translated Hamiltonian chord for H = c
    const double cc = 0.7, T = 1.2;
    const auto H = HamiltonianSpec::constant(1, cc);
    const ContactIsotopy iso(c, H, 1000);
    const PathGamma g = PathGamma::sample(1, 100, [&](double t) {
        return iso.phi(t, vec({0.3, 0, T * t}));
    });
    CHECK(critical_residual(c, H, g) < 1e-6);
    // a xi-directed bump of size delta shows up linearly
    double prev = 0.0;
    for (double delta : {1e-2, 2e-2, 4e-2}) {
        const PathGamma p = PathGamma::sample(1, 200, [&](double t) {
            return vec({0.3, delta * std::sin(M_PI * t), 2 * t});
        });
        const double r = critical_residual(c, HamiltonianSpec::zero(1), p);
        CHECK(r == doctest::Approx(M_PI * delta).epsilon(1e-3));
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("path CSV round trip") {
    std::mt19937 rng(14);
    const PathGamma g = random_path(2, 20, rng);
    std::stringstream ss;
    write_path_csv(ss, g);
    const PathGamma h = read_path_csv(ss, 2);
    REQUIRE(h.points.size() == g.points.size());
    for (std::size_t k = 0; k < g.points.size(); ++k) CHECK((h.points[k] - g.points[k]).norm() == 0.0);
}

}
