#include "contacton/validators.hpp"

#include "contacton/parallel.hpp"

#include <cmath>

namespace contacton {

double field_scale(const MapField& u) {
    double m = 0.0;
    for (int i = 0; i <= u.grid.M; ++i)
        for (int j = 0; j <= u.grid.N; ++j) m = std::max({m, u.d_tau(i, j).norm(), u.d_t(i, j).norm()});
    return 1.0 + m;
}

double default_onshell_threshold(const MapField& u) {
    const double h = u.grid.spacing();
    return 10.0 * h * h * field_scale(u);
}

namespace {

Mat J_matrix_xi(const TriadChart& chart) {
    const int m = 2 * chart.n();
    Mat Jm(m, m);
    for (int a = 0; a < m; ++a) {
        Vec e = Vec::Zero(m);
        e(a) = 1.0;
        Jm.col(a) = chart.J_xi(e);
    }
    return Jm;
}

// (L_R J) in the unitary frame, restricted to xi.
Mat lie_xi(const TriadChart& chart, const Vec& p) {
    const int m = 2 * chart.n();
    const Mat F = chart.frame(p);
    const Mat L = F.inverse() * chart.lie_derivative_RJ(p) * F;
    return L.topLeftCorner(m, m);
}

Vec torsion_pi(const TriadChart& chart, const ConnectionCoeffs& C, const Vec& p, const Vec& a, const Vec& b) {
    return chart.xi_coords(p, torsion(C, chart.from_xi_coords(p, a), chart.from_xi_coords(p, b)));
}

struct Nodes {
    std::vector<Vec> utau, ut, zeta, eta, Xpi;
    std::vector<double> f, g, RH;
    std::vector<Mat> Atau, At, L;
    std::vector<ConnectionCoeffs> C;
};

Nodes gather(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u, const ConnectionProvider& conn,
             bool geometry) {
    const StripGrid& gr = u.grid;
    const std::size_t K = u.u.size();
    Nodes d;
    d.utau.resize(K);
    d.ut.resize(K);
    d.zeta.resize(K);
    d.eta.resize(K);
    d.Xpi.resize(K);
    d.f.resize(K);
    d.g.resize(K);
    d.RH.resize(K);
    if (geometry) {
        d.Atau.resize(K);
        d.At.resize(K);
        d.L.resize(K);
        d.C.resize(K);
    }
    parallel_for(K, [&](std::size_t k) {
        const int i = static_cast<int>(k) / (gr.N + 1), j = static_cast<int>(k) % (gr.N + 1);
        const Vec& p = u.u[k];
        const double t = gr.t(j);
        const Vec X = contact_field(chart, H, t, p);
        d.utau[k] = u.d_tau(i, j);
        d.ut[k] = u.d_t(i, j);
        d.zeta[k] = chart.xi_coords(p, d.utau[k]);
        d.eta[k] = chart.xi_coords(p, d.ut[k] - X);
        d.Xpi[k] = chart.xi_coords(p, X);
        d.f[k] = chart.lambda(p, d.utau[k]);
        d.g[k] = chart.lambda(p, d.ut[k]) + H.H(t, p);
        d.RH[k] = H.RH(t, p);
        if (geometry) {
            d.C[k] = conn(p);
            d.Atau[k] = xi_connection_matrix(chart, d.C[k], d.utau[k]);
            d.At[k] = xi_connection_matrix(chart, d.C[k], d.ut[k]);
            d.L[k] = lie_xi(chart, p);
        }
    });
    return d;
}

// Cell (i, j) stencil helpers: corners a = (i, j), b = (i+1, j), c = (i, j+1), e = (i+1, j+1).
struct Cell {
    int a, b, c, e;
    double dtau, dt;
    template <class F>
    auto Dtau(const F& v) const {
        using T = std::decay_t<decltype(v(0))>;
        return T((v(b) + v(e) - v(a) - v(c)) / (2.0 * dtau));
    }
    template <class F>
    auto Dt(const F& v) const {
        using T = std::decay_t<decltype(v(0))>;
        return T((v(c) + v(e) - v(a) - v(b)) / (2.0 * dt));
    }
    template <class F>
    auto avg(const F& v) const {
        using T = std::decay_t<decltype(v(0))>;
        return T(0.25 * (v(a) + v(b) + v(c) + v(e)));
    }
};

Cell make_cell(const StripGrid& g, int i, int j) {
    return Cell{g.index(i, j), g.index(i + 1, j), g.index(i, j + 1), g.index(i + 1, j + 1), g.dtau(), g.dt()};
}

struct Accum {
    double sum = 0.0, max = 0.0;
    void add(double v, double w) {
        sum += w * v * v;
        if (!(v <= max)) max = v;  // keeps NaN visible
    }
    double l2() const { return std::sqrt(sum); }
};

double identity_tolerance(const MapField& u, const ValidatorOptions& opt) {
    return opt.tolerance > 0.0 ? opt.tolerance : 50.0 * u.grid.spacing() * field_scale(u);
}

void require_cr(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u, const ValidatorOptions& opt) {
    if (!opt.check_preconditions) return;
    const double thr = opt.onshell_threshold > 0.0 ? opt.onshell_threshold : default_onshell_threshold(u);
    const double cr = cr_residual(chart, H, u).norms.max;
    if (!(cr <= thr)) throw PreconditionError("cr_residual", cr, thr);
}

void require_closed(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                    const MapField& u, const ValidatorOptions& opt) {
    if (!opt.check_preconditions) return;
    const double thr = opt.onshell_threshold > 0.0 ? opt.onshell_threshold : default_onshell_threshold(u);
    const double cl = closedness_residual(chart, H, iso, u).norms.max;
    if (!(cl <= thr)) throw PreconditionError("closedness_residual", cl, thr);
}

ConnectionProvider provider_or_standard(const TriadChart& chart, const ValidatorOptions& opt) {
    return opt.connection ? opt.connection : standard_connection(chart);
}

}  // namespace

IsothermalFields isothermal_fields(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u) {
    const Nodes d = gather(chart, H, u, {}, false);
    IsothermalFields r;
    r.zeta = d.zeta;
    r.f = d.f;
    r.g = d.g;
    r.alpha.resize(d.f.size());
    for (std::size_t k = 0; k < d.f.size(); ++k) r.alpha[k] = {d.g[k], d.f[k]};
    return r;
}

ResidualReport fundamental_equation_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                             const MapField& u, const ValidatorOptions& opt) {
    require_cr(chart, H, u, opt);
    const StripGrid& gr = u.grid;
    const Nodes d = gather(chart, H, u, provider_or_standard(chart, opt), true);
    const Mat Jm = J_matrix_xi(chart);
    Accum acc;
    for (int i = 0; i < gr.M; ++i)
        for (int j = 0; j < gr.N; ++j) {
            const Cell c = make_cell(gr, i, j);
            const Vec lhs = Vec(c.Dtau([&](int k) -> const Vec& { return d.eta[k]; }) -
                                c.Dt([&](int k) -> const Vec& { return d.zeta[k]; })) +
                            c.avg([&](int k) { return Vec(d.Atau[k] * d.eta[k] - d.At[k] * d.zeta[k]); });
            const Vec rhs123 = c.avg([&](int k) {
                const Vec& p = u.u[k];
                const double lam_t = d.g[k] - H.H(gr.t(k % (gr.N + 1)), p);
                const Vec t1 = 0.5 * d.L[k] * Jm * (d.f[k] * d.eta[k] - lam_t * d.zeta[k]);
                const Vec t2 = 2.0 * torsion_pi(chart, d.C[k], p, d.Xpi[k], d.zeta[k]);
                const Vec t3 = 0.5 * d.f[k] * d.L[k] * Jm * d.Xpi[k];
                return Vec(t1 + t2 + t3);
            });
            const Vec t4 = -(c.Dtau([&](int k) -> const Vec& { return d.Xpi[k]; }) +
                             c.avg([&](int k) { return Vec(d.Atau[k] * d.Xpi[k]); }));
            acc.add((lhs - rhs123 - t4).norm(), gr.dtau() * gr.dt());
        }
    ResidualReport rep;
    rep.add("fundamental", acc.l2(), acc.max, identity_tolerance(u, opt));
    return rep;
}

ResidualReport du_lambdaH_residual(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u,
                                   const ValidatorOptions& opt) {
    require_cr(chart, H, u, opt);
    const StripGrid& gr = u.grid;
    const Nodes d = gather(chart, H, u, {}, false);
    Accum acc;
    for (int i = 0; i < gr.M; ++i)
        for (int j = 0; j < gr.N; ++j) {
            const Cell c = make_cell(gr, i, j);
            const double lhs = c.Dtau([&](int k) { return d.g[k]; }) - c.Dt([&](int k) { return d.f[k]; });
            const double rhs = c.avg([&](int k) {
                return 0.5 * (d.zeta[k].squaredNorm() + d.eta[k].squaredNorm()) + d.RH[k] * d.f[k];
            });
            acc.add(std::abs(lhs - rhs), gr.dtau() * gr.dt());
        }
    ResidualReport rep;
    const double h = gr.spacing();
    rep.add("du_lambdaH", acc.l2(), acc.max, opt.tolerance > 0 ? opt.tolerance : 10.0 * h * h * field_scale(u));
    return rep;
}

ResidualReport isothermal_system_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                          const ContactIsotopy& iso, const MapField& u,
                                          const ValidatorOptions& opt) {
    require_cr(chart, H, u, opt);
    require_closed(chart, H, iso, u, opt);
    const StripGrid& gr = u.grid;
    const Nodes d = gather(chart, H, u, provider_or_standard(chart, opt), true);
    const Mat Jm = J_matrix_xi(chart);
    MapField withg = u;
    if (withg.gHu.size() != u.u.size()) withg.attach_exponents(iso);
    const std::vector<double>& ge = withg.gHu;

    Accum a_corr, a_disp, z_lam, z_lamH, z_disp;
    const double w = gr.dtau() * gr.dt();
    for (int i = 0; i < gr.M; ++i)
        for (int j = 0; j < gr.N; ++j) {
            const Cell c = make_cell(gr, i, j);
            auto F = [&](int k) { return d.f[k]; };
            auto G = [&](int k) { return d.g[k]; };
            auto E = [&](int k) { return ge[k]; };
            const std::complex<double> dbar(0.5 * (c.Dtau(G) - c.Dt(F)), 0.5 * (c.Dtau(F) + c.Dt(G)));
            const double zeta2 = c.avg([&](int k) { return d.zeta[k].squaredNorm(); });
            const double Gterm = c.avg([&](int k) { return d.RH[k] * d.f[k]; });
            const double weight_term = 0.5 * (c.Dtau(E) * c.avg(F) + c.Dt(E) * c.avg(G));
            a_corr.add(std::abs(dbar - std::complex<double>(0.5 * zeta2 + 0.5 * Gterm, -weight_term)), w);
            a_disp.add(std::abs(dbar - std::complex<double>(0.5 * zeta2 + Gterm, 0.0)), w);

            const Vec base = Vec(c.Dtau([&](int k) -> const Vec& { return d.zeta[k]; }) +
                                 Jm * c.Dt([&](int k) -> const Vec& { return d.zeta[k]; })) +
                             c.avg([&](int k) { return Vec((d.Atau[k] + Jm * d.At[k]) * d.zeta[k]); });
            auto Bterm = [&](bool lambdaH) {
                return c.avg([&](int k) {
                    const Vec& p = u.u[k];
                    const double gk = lambdaH ? d.g[k] : d.g[k] - H.H(gr.t(k % (gr.N + 1)), p);
                    const Vec b = -0.5 * gk * d.L[k] * d.zeta[k] + 0.5 * d.f[k] * d.L[k] * Jm * d.zeta[k] +
                                  2.0 * Jm * torsion_pi(chart, d.C[k], p, d.Xpi[k], d.zeta[k]);
                    return b;
                });
            };
            const Vec JP = Jm * c.avg([&](int k) { return Vec(0.5 * d.f[k] * d.L[k] * Jm * d.Xpi[k]); });
            const Vec JW = Jm * Vec(c.Dtau([&](int k) -> const Vec& { return d.Xpi[k]; }) +
                                    c.avg([&](int k) { return Vec(d.Atau[k] * d.Xpi[k]); }));
            const Vec Bl = Bterm(false), BlH = Bterm(true);
            z_lam.add((base + Bl + JP - JW).norm(), w);
            z_lamH.add((base + BlH + JP - JW).norm(), w);
            z_disp.add((base + Bl + JP).norm(), w);
        }
    ResidualReport rep;
    const double h = gr.spacing();
    const double tol2 = opt.tolerance > 0 ? opt.tolerance : 10.0 * h * h * field_scale(u);
    rep.add("alpha_dbar", a_corr.l2(), a_corr.max, tol2);
    rep.add("alpha_dbar_full_G", a_disp.l2(), a_disp.max, tol2);
    if (u.R0 || u.R1) {
        double m = 0.0;
        for (int i = 0; i <= gr.M; ++i) {
            if (u.R0) m = std::max(m, std::abs(d.f[gr.index(i, 0)]));
            if (u.R1) m = std::max(m, std::abs(d.f[gr.index(i, gr.N)]));
        }
        rep.add("alpha_boundary_imag", m, m, 1e-8);
    }
    rep.add("zeta_B_lambda", z_lam.l2(), z_lam.max, tol2);
    rep.add("zeta_B_lambdaH", z_lamH.l2(), z_lamH.max, tol2);
    rep.add("zeta_homogeneous", z_disp.l2(), z_disp.max, tol2);
    return rep;
}

ResidualReport weitzenbock_laplacian_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                              const MapField& u, const ValidatorOptions& opt,
                                              std::vector<CurvatureSample>* samples) {
    require_cr(chart, H, u, opt);
    const StripGrid& gr = u.grid;
    const ConnectionProvider conn = provider_or_standard(chart, opt);
    const Nodes d = gather(chart, H, u, conn, true);
    const Mat Jm = J_matrix_xi(chart);
    const int m = 2 * chart.n();
    const std::size_t K = u.u.size();

    auto node_dtau = [&](const std::vector<Vec>& v, int i, int j) {
        return grid_derivative([&](int k) -> const Vec& { return v[gr.index(k, j)]; }, i, gr.M, gr.dtau());
    };
    auto node_dt = [&](const std::vector<Vec>& v, int i, int j) {
        return grid_derivative([&](int k) -> const Vec& { return v[gr.index(i, k)]; }, j, gr.N, gr.dt());
    };
    // W = nabla_tau X^pi_H(u) at every node.
    std::vector<Vec> W(K);
    for (int i = 0; i <= gr.M; ++i)
        for (int j = 0; j <= gr.N; ++j) {
            const int k = gr.index(i, j);
            W[k] = grid_derivative4([&](int m) -> const Vec& { return d.Xpi[gr.index(m, j)]; }, i, gr.M, gr.dtau()) +
                   d.Atau[k] * d.Xpi[k];
        }

    Accum acc;
    double vanishing = 0.0;
    const double w = gr.dtau() * gr.dt();
    for (int i = 1; i < gr.M; ++i)
        for (int j = 1; j < gr.N; ++j) {
            const int k = gr.index(i, j);
            auto e = [&](int kk) { return d.zeta[kk].squaredNorm(); };
            const double lap = (e(gr.index(i + 1, j)) + e(gr.index(i - 1, j)) - 2.0 * e(k)) / (gr.dtau() * gr.dtau()) +
                               (e(gr.index(i, j + 1)) + e(gr.index(i, j - 1)) - 2.0 * e(k)) / (gr.dt() * gr.dt());
            const Vec& z = d.zeta[k];
            const Vec nz_tau = node_dtau(d.zeta, i, j) + d.Atau[k] * z;
            const Vec nz_t = node_dt(d.zeta, i, j) + d.At[k] * z;
            const Vec Wt = node_dt(W, i, j) + d.At[k] * W[k];
            const Vec Wtau = node_dtau(W, i, j) + d.Atau[k] * W[k];
            // F(d_tau, d_t) = d_tau A_t - d_t A_tau + [A_tau, A_t]
            const Mat dAt = (d.At[gr.index(i + 1, j)] - d.At[gr.index(i - 1, j)]) / (2.0 * gr.dtau());
            const Mat dAtau = (d.Atau[gr.index(i, j + 1)] - d.Atau[gr.index(i, j - 1)]) / (2.0 * gr.dt());
            const Mat Fc = dAt - dAtau + d.Atau[k] * d.At[k] - d.At[k] * d.Atau[k];
            const double rhs = nz_tau.squaredNorm() + nz_t.squaredNorm() + Wt.dot(z) - Wtau.dot(Jm * z) -
                               (Jm * Fc * z).dot(z);
            acc.add(std::abs(0.5 * lap - rhs), w);

            double tors = 0.0;
            for (int a = 0; a < m; ++a)
                for (int b = a + 1; b < m; ++b) {
                    Vec ea = Vec::Zero(m), eb = Vec::Zero(m);
                    ea(a) = 1.0;
                    eb(b) = 1.0;
                    tors = std::max(tors, torsion_pi(chart, d.C[k], u.u[k], ea, eb).norm());
                }
            vanishing = std::max({vanishing, d.L[k].norm(), tors});
            if (samples) samples->push_back(CurvatureSample{k, Fc, d.L[k], tors});
        }
    ResidualReport rep;
    rep.add("weitzenbock", acc.l2(), acc.max, identity_tolerance(u, opt));
    rep.add("weitzenbock_vanishing_terms", vanishing, vanishing, 1e-6);
    return rep;
}

std::vector<ConvergenceLevel> refinement_study(const std::function<ResidualReport(const StripGrid&)>& run,
                                               const StripGrid& base, int levels, double floor) {
    std::vector<ConvergenceLevel> out;
    StripGrid g = base;
    for (int l = 0; l < levels; ++l) {
        out.push_back({g, run(g)});
        if (l > 0) {
            const ResidualReport& prev = out[l - 1].report;
            for (ResidualEntry& e : out[l].report.entries) {
                const ResidualEntry* p = prev.find(e.name);
                if (p && !(p->max <= floor && e.max <= floor) && e.max > 0.0)
                    e.order = observed_order(p->max, e.max);
            }
        }
        g = g.refined();
    }
    return out;
}

}  // namespace contacton
