#include "contacton/connection.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace contacton;
using test::vec;

TEST_SUITE("triad_connection") {

TEST_CASE("closed-form Christoffel symbols") {
    TriadChart c(1);
    const auto G = christoffel_at(c, vec({0.3, -0.2, 1.0}));
    CHECK(G(c.iz(), c.iy(0), c.ix(0)) == -1.0);
    double others = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!(k == c.iz() && i == c.iy(0) && j == c.ix(0))) others = std::max(others, std::abs(G(k, i, j)));
    CHECK(others == 0.0);
}

TEST_CASE("axiom system reproduces the closed form") {
    for (int n : {1, 2}) {
        TriadChart c(n);
        std::mt19937 rng(30 + n);
        const Vec p = test::random_vec(c.dim(), rng, 2.0);
        const auto A = christoffel_from_axioms(c, p);
        const auto B = christoffel_at(c, p);
        double diff = 0.0;
        for (int k = 0; k < c.dim(); ++k)
            for (int i = 0; i < c.dim(); ++i)
                for (int j = 0; j < c.dim(); ++j) diff = std::max(diff, std::abs(A(k, i, j) - B(k, i, j)));
        CHECK(diff < 1e-10);
    }
}

TEST_CASE("torsion values") {
    TriadChart c(1);
    const Vec p = vec({0.5, 2.0, -1.0});
    const auto G = christoffel_at(c, p);
    const Vec e1 = vec({1, 0, p(1)});
    const Vec e2 = vec({0, 1, 0});
    CHECK(c.lambda(p, torsion(G, e1, e2)) == doctest::Approx(1.0));
    std::mt19937 rng(8);
    for (int k = 0; k < 5; ++k) CHECK(torsion(G, c.reeb(p), test::random_vec(3, rng)).norm() < 1e-14);
}

TEST_CASE("nabla R vanishes for the standard triad") {
    TriadChart c(1);
    const Vec p = vec({0.1, 0.7, 0.3});
    const auto G = christoffel_at(c, p);
    const VectorField R = [&](const Vec& q) { return c.reeb(q); };
    std::mt19937 rng(9);
    for (int k = 0; k < 5; ++k) {
        const TangentVec X(TriadPoint(p, 1), test::random_vec(3, rng));
        CHECK(cov_deriv(c, G, X, R).norm() < 1e-10);
    }
}

TEST_CASE("all axioms and corollaries hold at random points") {
    for (int n : {1, 2}) {
        TriadChart c(n);
        const auto rep = verify_triad_axioms(c, standard_connection(c), 100, 5, 1e-6);
        CHECK(rep.all_pass());
        CHECK(rep.entries.size() >= 8);
        CHECK(rep.worst_max() < 1e-6);
    }
}

TEST_CASE("corrupted Christoffel symbol is detected") {
    TriadChart c(1);
    std::mt19937 rng(2);
    const Vec p = test::random_vec(3, rng);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                auto G = christoffel_at(c, p);
                G(k, i, j) += 1e-2;
                const auto res = axiom_residuals(c, G);
                double worst = 0.0;
                for (std::size_t a = 0; a < res.names.size(); ++a) worst = std::max(worst, res.max_abs(a));
                CHECK(worst > 1e-3);
            }
    const ConnectionProvider bad = [&](const Vec& q) {
        auto G = christoffel_at(c, q);
        G(c.ix(0), c.iy(0), c.iz()) += 1e-2;
        return G;
    };
    const auto rep = verify_triad_axioms(c, bad, 10, 1, 1e-6);
    CHECK_FALSE(rep.all_pass());
    CHECK(rep.worst_max() > 1e-3);
}

TEST_CASE("flat standard connection has no curvature") {
    TriadChart c(1);
    const auto R = riemann_at(standard_connection(c), vec({0.2, 0.4, -0.1}), 1e-4);
    double m = 0.0;
    for (double r : R.R) m = std::max(m, std::abs(r));
    CHECK(m < 1e-8);
}

}
