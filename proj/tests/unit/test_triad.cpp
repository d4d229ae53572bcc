#include "contacton/triad.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace contacton;
using test::vec;

TEST_SUITE("triad_geometry") {

TEST_CASE("lambda is dz - y dx") {
    TriadChart c(1);
    CHECK(c.lambda(vec({1, 2, 3}), vec({1, 0, 0})) == doctest::Approx(-2.0));
    CHECK(c.lambda(vec({0, 0, 0}), vec({1, 0, 0})) == 0.0);
    std::mt19937 rng(3);
    for (int k = 0; k < 10; ++k) {
        const Vec p = test::random_vec(3, rng, 5.0);
        CHECK(c.lambda(p, c.reeb(p)) == doctest::Approx(1.0));
    }
    CHECK(lambda_at(c, TangentVec(TriadPoint(vec({1, 2, 3}), 1), vec({1, 0, 0}))) == doctest::Approx(-2.0));
}

TEST_CASE("projection onto xi") {
    TriadChart c(1);
    const Vec p = vec({0, 1, 0});
    CHECK((c.project(p, vec({1, 0, 0})) - vec({1, 0, 1})).norm() < 1e-15);
    CHECK(c.project(p, c.reeb(p)).norm() < 1e-15);
    std::mt19937 rng(4);
    for (int k = 0; k < 10; ++k) {
        const Vec q = test::random_vec(3, rng, 3.0);
        const Vec v = test::random_vec(3, rng);
        const Vec pv = c.project(q, v);
        CHECK(std::abs(c.lambda(q, pv)) < 1e-14);
        CHECK((c.project(q, pv) - pv).norm() < 1e-14);
    }
}

TEST_CASE("J on xi") {
    TriadChart c(1);
    const Vec p = vec({0, 1, 0});
    CHECK((c.J(p, vec({1, 0, 1})) - vec({0, 1, 0})).norm() < 1e-15);
    CHECK(c.J(p, c.reeb(p)).norm() < 1e-15);
    for (int n : {1, 2, 3}) {
        TriadChart cn(n);
        std::mt19937 rng(10 + n);
        for (int k = 0; k < 10; ++k) {
            const Vec q = test::random_vec(cn.dim(), rng, 2.0);
            const Vec v = test::random_vec(cn.dim(), rng);
            CHECK((cn.J(q, cn.J(q, v)) + cn.project(q, v)).norm() < 1e-13);
            // compatibility: g(Jv, Jw) = g(Pi v, Pi w)
            const Vec w = test::random_vec(cn.dim(), rng);
            CHECK(cn.metric(q, cn.J(q, v), cn.J(q, w)) ==
                  doctest::Approx(cn.metric(q, cn.project(q, v), cn.project(q, w))).epsilon(1e-12));
        }
    }
}

TEST_CASE("Lie derivative of J along R vanishes") {
    for (int n : {1, 2}) {
        TriadChart c(n);
        std::mt19937 rng(20 + n);
        for (int k = 0; k < 5; ++k) {
            const Vec p = test::random_vec(c.dim(), rng, 2.0);
            CHECK(c.lie_derivative_RJ(p).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("frame coordinates round trip") {
    TriadChart c(2);
    std::mt19937 rng(5);
    const Vec p = test::random_vec(5, rng);
    const Vec v = test::random_vec(5, rng);
    const Vec xc = c.xi_coords(p, v);
    CHECK(xc.size() == 4);
    CHECK((c.from_xi_coords(p, xc) - c.project(p, v)).norm() < 1e-14);
    CHECK((c.xi_coords(p, c.J(p, v)) - c.J_xi(xc)).norm() < 1e-14);
}

TEST_CASE("dimension mismatch throws") {
    TriadChart c(1);
    CHECK_THROWS_AS(lambda_at(c, TangentVec(TriadPoint(vec({1, 2, 3, 4, 5}), 2), vec({1, 0, 0}))), DimensionError);
    CHECK_THROWS_AS(J_apply(c, TangentVec(TriadPoint(vec({1, 2, 3}), 1), vec({1, 0}))), DimensionError);
}

TEST_CASE("affine Legendrian") {
    TriadChart c(1);
    Mat V(3, 1);
    V << 1, 0, 0;
    const auto R = LegendrianSpec::affine(c, vec({0, 0, 1}), V);
    CHECK(R.legendrian_defect(c) < 1e-15);
    CHECK((R.project(vec({2, 3, 4})) - vec({2, 0, 1})).norm() < 1e-14);
    Mat bad(3, 1);
    bad << 0, 0, 1;
    CHECK_THROWS(LegendrianSpec::affine(c, vec({0, 0, 0}), bad));
}

}
