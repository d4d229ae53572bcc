#include "contacton/validators.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>

namespace contacton {

namespace {

using V2 = Eigen::Vector2d;
using M2 = Eigen::Matrix2d;

// Sum of a few random products sin(k tau + p) cos(l t + q).
struct Modes {
    std::array<double, 12> c{};
    double operator()(double tau, double t) const {
        double s = 0.0;
        for (int m = 0; m < 3; ++m)
            s += c[4 * m] * std::sin(c[4 * m + 1] * tau + c[4 * m + 2]) * std::cos(c[4 * m + 3] * t + 0.3 * m);
        return s;
    }
};

Modes random_modes(std::mt19937& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), freq(0.5, 2.5), phase(0.0, 3.0);
    Modes m;
    for (int k = 0; k < 3; ++k) {
        m.c[4 * k] = amp(rng);
        m.c[4 * k + 1] = freq(rng);
        m.c[4 * k + 2] = phase(rng);
        m.c[4 * k + 3] = freq(rng);
    }
    return m;
}

// E-valued 1-form components beta = b_tau dtau + b_t dt, and the Hodge star with *dtau = dt, *dt = -dtau.
struct OneForm {
    V2 tau, t;
};
OneForm star(const OneForm& b) { return {-b.t, b.tau}; }
// (b1 ^ b2)(d_tau, d_t) with the fibre inner product.
double wedge(const OneForm& b1, const OneForm& b2) { return b1.tau.dot(b2.t) - b1.t.dot(b2.tau); }
double inner(const OneForm& b1, const OneForm& b2) { return b1.tau.dot(b2.tau) + b1.t.dot(b2.t); }

M2 skew(double a) {
    M2 m;
    m << 0.0, -a, a, 0.0;
    return m;
}

}  // namespace

ResidualReport vector_form_calculus_check(const StripGrid& grid, unsigned seed) {
    std::mt19937 rng(seed);
    std::array<Modes, 8> md;
    for (auto& m : md) m = random_modes(rng);
    const double L = grid.tau1 - grid.tau0;
    auto bump = [&](double tau, double t) {
        const double s = std::sin(M_PI * (tau - grid.tau0) / L), r = std::sin(M_PI * t);
        return s * s * r * r;
    };

    const int M = grid.M, N = grid.N;
    const std::size_t K = grid.nodes();
    std::vector<V2> b0(K);
    std::vector<OneForm> b1(K), b2(K);
    std::vector<M2> Atau(K), At(K);
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= N; ++j) {
            const double tau = grid.tau(i), t = grid.t(j);
            const int k = grid.index(i, j);
            const double w = bump(tau, t);
            b0[k] = w * V2(md[0](tau, t), md[1](tau, t));
            b1[k] = {w * V2(md[2](tau, t), md[3](tau, t)), w * V2(md[4](tau, t), md[5](tau, t))};
            b2[k] = {V2(md[5](tau, t), md[0](tau, t)), V2(md[1](tau, t), md[3](tau, t))};
            Atau[k] = skew(md[6](tau, t));
            At[k] = skew(md[7](tau, t));
        }

    auto Dtau = [&](auto get, int i, int j) {
        return grid_derivative([&](int m) { return get(grid.index(m, j)); }, i, M, grid.dtau());
    };
    auto Dt = [&](auto get, int i, int j) {
        return grid_derivative([&](int m) { return get(grid.index(i, m)); }, j, N, grid.dt());
    };

    ResidualReport rep;

    // <b1, b2> = *(b1 ^ *b2), pointwise algebra.
    double alg = 0.0;
    for (std::size_t k = 0; k < K; ++k) alg = std::max(alg, std::abs(inner(b1[k], b2[k]) - wedge(b1[k], star(b2[k]))));
    rep.add("inner_star", alg, alg, 1e-12);

    // <d b0, b1> - <b0, delta b1> = *d(b0 ^ *b1), delta = -* d *  on 1-forms over a surface.
    const double h = grid.spacing();
    double global = 0.0, point_sq = 0.0, point_max = 0.0;
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= N; ++j) {
            const int k = grid.index(i, j);
            const V2 nb0_tau = Dtau([&](int m) { return b0[m]; }, i, j) + Atau[k] * b0[k];
            const V2 nb0_t = Dt([&](int m) { return b0[m]; }, i, j) + At[k] * b0[k];
            // *b1 has components (-b1_t, b1_tau); d^nabla of it, then * of the 2-form.
            const V2 d_star = Dtau([&](int m) { return V2(b1[m].tau); }, i, j) + Atau[k] * b1[k].tau +
                              Dt([&](int m) { return V2(b1[m].t); }, i, j) + At[k] * b1[k].t;
            const V2 delta_b1 = -d_star;
            const double lhs = nb0_tau.dot(b1[k].tau) + nb0_t.dot(b1[k].t) - b0[k].dot(delta_b1);
            // b0 ^ *b1 as a scalar 1-form w, then *dw = d_tau w_t - d_t w_tau.
            auto w_tau = [&](int m) { return b0[m].dot(star(b1[m]).tau); };
            auto w_t = [&](int m) { return b0[m].dot(star(b1[m]).t); };
            const double rhs = Dtau(w_t, i, j) - Dt(w_tau, i, j);
            global += grid.weight(i, j) * lhs;
            const double r = std::abs(lhs - rhs);
            point_sq += grid.weight(i, j) * r * r;
            point_max = std::max(point_max, r);
        }
    rep.add("metric_property_global", std::abs(global), std::abs(global), 100.0 * h * h);
    rep.add("metric_property_pointwise", std::sqrt(point_sq), point_max, 500.0 * h * h);

    // d^nabla b2 (d_tau, d_t): node-wise (nabla_tau b)(d_t) - (nabla_t b)(d_tau) averaged to the
    // cell, against the circulation of b2 around the cell plus the corner-averaged connection term.
    double dn_sq = 0.0, dn_max = 0.0;
    std::vector<V2> nodewise(K);
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= N; ++j) {
            const int k = grid.index(i, j);
            nodewise[k] = Dtau([&](int m) { return V2(b2[m].t); }, i, j) + Atau[k] * b2[k].t -
                          Dt([&](int m) { return V2(b2[m].tau); }, i, j) - At[k] * b2[k].tau;
        }
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < N; ++j) {
            const int a = grid.index(i, j), b = grid.index(i + 1, j), c = grid.index(i, j + 1),
                      e = grid.index(i + 1, j + 1);
            const V2 avg_node = 0.25 * (nodewise[a] + nodewise[b] + nodewise[c] + nodewise[e]);
            const V2 circ = (b2[b].t + b2[e].t - b2[a].t - b2[c].t) / (2.0 * grid.dtau()) -
                            (b2[c].tau + b2[e].tau - b2[a].tau - b2[b].tau) / (2.0 * grid.dt());
            V2 conn = V2::Zero();
            for (int q : {a, b, c, e}) conn += 0.25 * (Atau[q] * b2[q].t - At[q] * b2[q].tau);
            const double r = (avg_node - circ - conn).norm();
            dn_sq += grid.dtau() * grid.dt() * r * r;
            dn_max = std::max(dn_max, r);
        }
    rep.add("dnabla_two_assemblies", std::sqrt(dn_sq), dn_max, 500.0 * h * h);
    return rep;
}

}  // namespace contacton
