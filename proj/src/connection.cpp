#include "contacton/connection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace contacton {

ResidualEntry& ResidualReport::add(std::string name, double l2, double max, double tolerance) {
    ResidualEntry e;
    e.name = std::move(name);
    e.l2 = l2;
    e.max = max;
    e.tolerance = tolerance;
    e.pass = std::isfinite(max) && max <= tolerance;
    entries.push_back(std::move(e));
    return entries.back();
}

bool ResidualReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(), [](const ResidualEntry& e) { return e.pass; });
}

const ResidualEntry* ResidualReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

const ResidualEntry& ResidualReport::at(const std::string& name) const {
    const auto* e = find(name);
    if (!e) throw std::out_of_range("no residual entry named " + name);
    return *e;
}

double ResidualReport::worst_max() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.max);
    return w;
}

Vec ConnectionCoeffs::contract(const Vec& X, const Vec& Y) const {
    Vec out = Vec::Zero(dim);
    for (int k = 0; k < dim; ++k) {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            if (X(i) == 0.0) continue;
            for (int j = 0; j < dim; ++j) s += (*this)(k, i, j) * X(i) * Y(j);
        }
        out(k) = s;
    }
    return out;
}

ConnectionCoeffs christoffel_at(const TriadChart& chart, const Vec& p) {
    chart.check(p);
    ConnectionCoeffs c(p, chart.dim());
    for (int i = 0; i < chart.n(); ++i) c(chart.iz(), chart.iy(i), chart.ix(i)) = -1.0;
    return c;
}

ConnectionCoeffs christoffel_at(const TriadChart& chart, const TriadPoint& p) {
    return christoffel_at(chart, p.coords);
}

ConnectionProvider standard_connection(const TriadChart& chart) {
    return [chart](const Vec& p) { return christoffel_at(chart, p); };
}

Vec torsion(const ConnectionCoeffs& c, const Vec& v, const Vec& w) {
    return c.contract(v, w) - c.contract(w, v);
}

TorsionSample torsion_sample(const TriadChart& chart, const ConnectionCoeffs& c,
                             const std::vector<std::pair<Vec, Vec>>& pairs) {
    TorsionSample s;
    s.base = c.base;
    s.pairs = pairs;
    for (const auto& [v, w] : pairs) {
        Vec T = torsion(c, v, w);
        s.T_pi.push_back(chart.project(c.base, T));
        s.T.push_back(std::move(T));
    }
    return s;
}

Vec cov_deriv(const TriadChart& chart, const ConnectionCoeffs& c, const TangentVec& X,
              const VectorField& Y, double h) {
    const Vec& p = X.base.coords;
    const Vec& x = X.components;
    chart.check(x);
    const Vec dY = (Y(p + h * x) - Y(p - h * x)) / (2.0 * h);
    return dY + c.contract(x, Y(p));
}

Vec cov_deriv(const TriadChart& chart, const ConnectionCoeffs& c, const TangentVec& X,
              const VectorField& Y) {
    return cov_deriv(chart, c, X, Y, chart.fd_step());
}

double AxiomResiduals::max_abs(std::size_t axiom) const {
    double m = 0.0;
    for (double v : values.at(axiom)) m = std::max(m, std::abs(v));
    return m;
}

namespace {

Vec unit(int d, int k) {
    Vec e = Vec::Zero(d);
    e(k) = 1.0;
    return e;
}

// Directional derivative of a matrix field along coordinate k.
Mat d_mat(const std::function<Mat(const Vec&)>& F, const Vec& p, int k, double h) {
    const Vec e = unit(static_cast<int>(p.size()), k);
    return (F(p + h * e) - F(p - h * e)) / (2.0 * h);
}

Vec d_vec(const VectorField& F, const Vec& p, const Vec& dir, double h) {
    return (F(p + h * dir) - F(p - h * dir)) / (2.0 * h);
}

// nabla_X Y for a field Y with known value and directional derivative.
Vec nabla(const ConnectionCoeffs& c, const Vec& X, const Vec& Yp, const Vec& dY) {
    return dY + c.contract(X, Yp);
}

AxiomResiduals evaluate(const TriadChart& chart, const ConnectionCoeffs& c, bool with_corollary) {
    const int d = chart.dim();
    const int n = chart.n();
    const Vec& p = c.base;
    const double h = chart.fd_step();

    AxiomResiduals out;
    out.names = {"metric", "torsion_R", "reeb_parallel", "hermitian", "torsion_pi_JYY", "dbar_R"};
    out.values.assign(6, {});

    const Mat g = chart.metric_matrix(p);
    const Mat Jm = chart.J_matrix(p);
    auto gfield = [&](const Vec& q) { return chart.metric_matrix(q); };
    auto Jfield = [&](const Vec& q) { return chart.J_matrix(q); };
    VectorField Rfield = [&](const Vec& q) { return chart.reeb(q); };
    const Vec R = chart.reeb(p);
    const Mat F = chart.frame(p);

    // (1) nabla g = 0
    for (int a = 0; a < d; ++a) {
        const Mat dg = d_mat(gfield, p, a, h);
        for (int b = 0; b < d; ++b)
            for (int cc = 0; cc < d; ++cc) {
                double r = dg(b, cc);
                for (int l = 0; l < d; ++l) r -= c(l, a, b) * g(l, cc) + c(l, a, cc) * g(b, l);
                out.values[0].push_back(r);
            }
    }
    // (2) T(R, .) = 0
    for (int b = 0; b < d; ++b) {
        const Vec T = torsion(c, R, unit(d, b));
        for (int k = 0; k < d; ++k) out.values[1].push_back(T(k));
    }
    // (3) nabla_R R = 0 and nabla_Y R in xi for Y in xi
    {
        const Vec v = nabla(c, R, R, d_vec(Rfield, p, R, h));
        for (int k = 0; k < d; ++k) out.values[2].push_back(v(k));
        for (int a = 0; a < 2 * n; ++a) {
            const Vec Y = F.col(a);
            const Vec w = nabla(c, Y, R, d_vec(Rfield, p, Y, h));
            out.values[2].push_back(chart.lambda(p, w));
        }
    }
    // (4) Pi (nabla_X J) Y = 0 for Y in xi
    for (int a = 0; a < d; ++a) {
        const Mat dJ = d_mat(Jfield, p, a, h);
        Mat nJ = dJ;
        for (int k = 0; k < d; ++k)
            for (int m = 0; m < d; ++m) {
                double s = 0.0;
                for (int l = 0; l < d; ++l) s += c(k, a, l) * Jm(l, m) - c(l, a, m) * Jm(k, l);
                nJ(k, m) += s;
            }
        for (int b = 0; b < 2 * n; ++b) {
            const Vec r = chart.project(p, nJ * F.col(b));
            for (int k = 0; k < d; ++k) out.values[3].push_back(r(k));
        }
    }
    // (5) T^pi(JY, Y) = 0, polarized over the xi-frame
    for (int a = 0; a < 2 * n; ++a)
        for (int b = a; b < 2 * n; ++b) {
            const Vec Ya = F.col(a), Yb = F.col(b);
            const Vec r = chart.project(p, torsion(c, chart.J(p, Ya), Yb) + torsion(c, chart.J(p, Yb), Ya));
            for (int k = 0; k < d; ++k) out.values[4].push_back(r(k));
        }
    // (6) (nabla_Y R - J nabla_{JY} R) / 2 = 0 for Y in xi
    for (int a = 0; a < 2 * n; ++a) {
        const Vec Y = F.col(a);
        const Vec JY = chart.J(p, Y);
        const Vec nY = nabla(c, Y, R, d_vec(Rfield, p, Y, h));
        const Vec nJY = nabla(c, JY, R, d_vec(Rfield, p, JY, h));
        const Vec r = 0.5 * (nY - chart.J(p, nJY));
        for (int k = 0; k < d; ++k) out.values[5].push_back(r(k));
    }

    if (with_corollary) {
        out.names.push_back("cor_nabla_R");
        out.names.push_back("cor_lambda_T");
        out.values.emplace_back();
        out.values.emplace_back();
        const Mat LJ = chart.lie_derivative_RJ(p);
        for (int a = 0; a < d; ++a) {
            const Vec Y = unit(d, a);
            const Vec r = nabla(c, Y, R, d_vec(Rfield, p, Y, h)) - 0.5 * LJ * (Jm * Y);
            for (int k = 0; k < d; ++k) out.values[6].push_back(r(k));
        }
        for (int a = 0; a < 2 * n; ++a)
            for (int b = 0; b < 2 * n; ++b) {
                const Vec Ya = F.col(a), Yb = F.col(b);
                out.values[7].push_back(chart.lambda(p, torsion(c, Ya, Yb)) - chart.dlambda(Ya, Yb));
            }
    }
    return out;
}

std::vector<double> flatten(const AxiomResiduals& r) {
    std::vector<double> v;
    for (const auto& a : r.values) v.insert(v.end(), a.begin(), a.end());
    return v;
}

}  // namespace

AxiomResiduals axiom_residuals(const TriadChart& chart, const ConnectionCoeffs& c) {
    return evaluate(chart, c, false);
}

AxiomResiduals axiom_and_corollary_residuals(const TriadChart& chart, const ConnectionCoeffs& c) {
    return evaluate(chart, c, true);
}

ConnectionCoeffs christoffel_from_axioms(const TriadChart& chart, const Vec& p) {
    chart.check(p);
    const int d = chart.dim();
    const int unknowns = d * d * d;
    ConnectionCoeffs zero(p, d);
    const std::vector<double> r0 = flatten(axiom_residuals(chart, zero));
    const int rows = static_cast<int>(r0.size());

    // The residual is affine in Gamma: r(G) = A G + r(0). Probe unit coefficients.
    Eigen::MatrixXd A(rows, unknowns);
    Eigen::VectorXd b(rows);
    for (int r = 0; r < rows; ++r) b(r) = -r0[r];
    int col = 0;
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j, ++col) {
                ConnectionCoeffs probe(p, d);
                probe(k, i, j) = 1.0;
                const std::vector<double> r1 = flatten(axiom_residuals(chart, probe));
                for (int r = 0; r < rows; ++r) A(r, col) = r1[r] - r0[r];
            }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-9);
    if (qr.rank() < unknowns)
        throw Error("triad axiom system is singular (rank " + std::to_string(qr.rank()) + " of " +
                    std::to_string(unknowns) + ")");
    const Eigen::VectorXd sol = qr.solve(b);
    ConnectionCoeffs c(p, d);
    col = 0;
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j, ++col) c(k, i, j) = sol(col);
    return c;
}

ResidualReport verify_triad_axioms(const TriadChart& chart, const ConnectionProvider& coeffs, int samples,
                                   unsigned seed, double tol) {
    if (samples < 1) throw Error("verify_triad_axioms needs at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::vector<double> worst, sumsq;
    std::vector<std::string> names;
    std::size_t count = 0;
    for (int s = 0; s < samples; ++s) {
        Vec p(chart.dim());
        for (int k = 0; k < chart.dim(); ++k) p(k) = U(rng);
        const AxiomResiduals r = axiom_and_corollary_residuals(chart, coeffs(p));
        if (names.empty()) {
            names = r.names;
            worst.assign(names.size(), 0.0);
            sumsq.assign(names.size(), 0.0);
        }
        for (std::size_t a = 0; a < names.size(); ++a) {
            worst[a] = std::max(worst[a], r.max_abs(a));
            for (double v : r.values[a]) sumsq[a] += v * v;
        }
        ++count;
    }
    ResidualReport rep;
    for (std::size_t a = 0; a < names.size(); ++a)
        rep.add(names[a], std::sqrt(sumsq[a] / static_cast<double>(count)), worst[a], tol);
    return rep;
}

Vec RiemannSample::apply(const Vec& X, const Vec& Y, const Vec& Z) const {
    Vec out = Vec::Zero(dim);
    for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) out(k) += (*this)(k, l, i, j) * Z(l) * X(i) * Y(j);
    return out;
}

RiemannSample riemann_at(const ConnectionProvider& coeffs, const Vec& p, double h) {
    const int d = static_cast<int>(p.size());
    RiemannSample S;
    S.base = p;
    S.dim = d;
    S.R.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
    const ConnectionCoeffs c = coeffs(p);
    std::vector<ConnectionCoeffs> dG;
    for (int i = 0; i < d; ++i) {
        const Vec e = unit(d, i);
        const ConnectionCoeffs cp = coeffs(p + h * e), cm = coeffs(p - h * e);
        ConnectionCoeffs g(p, d);
        for (std::size_t q = 0; q < g.G.size(); ++q) g.G[q] = (cp.G[q] - cm.G[q]) / (2.0 * h);
        dG.push_back(g);
    }
    for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double v = dG[i](k, j, l) - dG[j](k, i, l);
                    for (int m = 0; m < d; ++m) v += c(k, i, m) * c(m, j, l) - c(k, j, m) * c(m, i, l);
                    S.R[((k * d + l) * d + i) * d + j] = v;
                }
    return S;
}

Mat xi_connection_matrix(const TriadChart& chart, const ConnectionCoeffs& c, const Vec& X) {
    const int n2 = 2 * chart.n();
    const Vec& p = c.base;
    const double h = chart.fd_step();
    Mat A(n2, n2);
    for (int b = 0; b < n2; ++b) {
        VectorField Eb = [&chart, b](const Vec& q) { return Vec(chart.frame(q).col(b)); };
        const Vec v = nabla(c, X, Eb(p), d_vec(Eb, p, X, h));
        A.col(b) = chart.xi_coords(p, v);
    }
    return A;
}

}  // namespace contacton
