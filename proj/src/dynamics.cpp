#include "contacton/dynamics.hpp"

#include "contacton/action.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace contacton {

Vec hamiltonian_vector_field(const TriadChart& chart, const HamiltonianSpec& H, double t, const Vec& p) {
    chart.check(p);
    const int d = chart.dim();
    const Mat F = chart.frame(p);
    const Vec dH = H.dH(t, p);
    const double RH = H.RH(t, p);
    Mat A(d, d);
    Vec b(d);
    A.row(0) = chart.lambda_row(p).transpose();
    b(0) = -H.H(t, p);
    for (int a = 0; a < 2 * chart.n(); ++a) {
        const Vec Y = F.col(a);
        for (int k = 0; k < d; ++k) {
            Vec e = Vec::Zero(d);
            e(k) = 1.0;
            A(1 + a, k) = chart.dlambda(e, Y);
        }
        b(1 + a) = dH.dot(Y) - RH * chart.lambda(p, Y);
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible()) throw Error("contact Hamiltonian system is singular");
    return lu.solve(b);
}

TangentVec hamiltonian_vector_field(const TriadChart& chart, const HamiltonianSpec& H, double t,
                                    const TriadPoint& p) {
    return TangentVec(p, hamiltonian_vector_field(chart, H, t, p.coords));
}

// X^{x_i} = H_{y_i}, X^{y_i} = -H_{x_i} - y_i H_z, X^z = -H + sum y_i H_{y_i}.
Vec contact_field(const TriadChart& chart, const HamiltonianSpec& H, double t, const Vec& p) {
    const int n = chart.n();
    const Vec g = H.dH(t, p);
    const double Hz = g(chart.iz());
    Vec X(chart.dim());
    double z = -H.H(t, p);
    for (int i = 0; i < n; ++i) {
        const double y = p(chart.iy(i));
        X(chart.ix(i)) = g(chart.iy(i));
        X(chart.iy(i)) = -g(chart.ix(i)) - y * Hz;
        z += y * g(chart.iy(i));
    }
    X(chart.iz()) = z;
    return X;
}

Mat contact_field_jacobian(const TriadChart& chart, const HamiltonianSpec& H, double t, const Vec& p) {
    const int n = chart.n(), d = chart.dim();
    const Vec g = H.dH(t, p);
    const Mat S = H.hessian(t, p);
    const int iz = chart.iz();
    Mat D(d, d);
    for (int q = 0; q < d; ++q) {
        double z = -g(q);
        for (int i = 0; i < n; ++i) {
            const int xi = chart.ix(i), yi = chart.iy(i);
            const double y = p(yi);
            D(xi, q) = S(yi, q);
            D(yi, q) = -S(xi, q) - y * S(iz, q) - (q == yi ? g(iz) : 0.0);
            z += (q == yi ? g(yi) : 0.0) + y * S(yi, q);
        }
        D(iz, q) = z;
    }
    return D;
}

ContactIsotopy::ContactIsotopy(TriadChart chart, HamiltonianSpec H, int steps, double blowup_bound)
    : chart_(std::move(chart)), H_(std::move(H)), steps_(steps), bound_(blowup_bound) {
    if (steps < 1) throw Error("isotopy needs at least one time step");
    if (H_.n() != chart_.n()) throw DimensionError("Hamiltonian and chart dimensions differ");
}

FlowResult ContactIsotopy::transport(const Vec& p, double from, double to, bool with_differential) const {
    chart_.check(p);
    const int d = chart_.dim();
    FlowResult r;
    r.point = p;
    r.g = 0.0;
    if (with_differential) r.D = Mat::Identity(d, d);
    const double span = to - from;
    if (span == 0.0) return r;
    const int m = std::max(1, static_cast<int>(std::ceil(std::abs(span) * steps_ - 1e-9)));
    const double h = span / m;

    Vec x = p;
    double g = 0.0;
    Mat D = with_differential ? Mat::Identity(d, d) : Mat();
    double t = from;
    for (int s = 0; s < m; ++s) {
        const double th = t + 0.5 * h, t1 = t + h;
        const Vec k1 = contact_field(chart_, H_, t, x);
        const Vec x2 = x + 0.5 * h * k1;
        const Vec k2 = contact_field(chart_, H_, th, x2);
        const Vec x3 = x + 0.5 * h * k2;
        const Vec k3 = contact_field(chart_, H_, th, x3);
        const Vec x4 = x + h * k3;
        const Vec k4 = contact_field(chart_, H_, t1, x4);
        const double g1 = -H_.RH(t, x), g2 = -H_.RH(th, x2), g3 = -H_.RH(th, x3), g4 = -H_.RH(t1, x4);
        if (with_differential) {
            const Mat K1 = contact_field_jacobian(chart_, H_, t, x) * D;
            const Mat K2 = contact_field_jacobian(chart_, H_, th, x2) * (D + 0.5 * h * K1);
            const Mat K3 = contact_field_jacobian(chart_, H_, th, x3) * (D + 0.5 * h * K2);
            const Mat K4 = contact_field_jacobian(chart_, H_, t1, x4) * (D + h * K3);
            D += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        }
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        g += (h / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
        t = from + (s + 1) * h;
        if (!x.allFinite() || x.norm() > bound_) {
            std::ostringstream os;
            os << "flow blow-up: |x| exceeded " << bound_ << " at t = " << t << " starting from ("
               << p.transpose() << ")";
            throw FlowBlowUp(os.str());
        }
    }
    r.point = x;
    r.g = g;
    if (with_differential) r.D = D;
    return r;
}

double ContactIsotopy::exponent(const Vec& p, double from, double to) const {
    if (H_.reeb_invariant() || from == to) return 0.0;
    if (!H_.reeb_constant_in_space()) return transport(p, from, to).g;
    // R[H] depends on t only: integrate it with the same step pattern.
    const double span = to - from;
    const int m = std::max(1, static_cast<int>(std::ceil(std::abs(span) * steps_ - 1e-9)));
    const double h = span / m;
    double g = 0.0;
    for (int s = 0; s < m; ++s) {
        const double t = from + s * h;
        g -= (h / 6.0) * (H_.RH(t, p) + 4.0 * H_.RH(t + 0.5 * h, p) + H_.RH(t + h, p));
    }
    return g;
}

double ContactIsotopy::g_Hu(double t, const Vec& p) const { return exponent(p, t, 1.0); }

ContactIsotopy integrate_isotopy(const TriadChart& chart, const HamiltonianSpec& H, int steps,
                                 const std::vector<Vec>& samples) {
    ContactIsotopy iso(chart, H, steps);
    iso.samples = samples;
    for (const auto& p : samples) {
        std::vector<Vec> traj{p};
        std::vector<double> ex{0.0};
        Vec x = p;
        double g = 0.0;
        for (int k = 0; k < steps; ++k) {
            const FlowResult r = iso.transport(x, iso.time(k), iso.time(k + 1));
            x = r.point;
            // Exponents add along the flow: g_{t+s}(p) = g_t(p) + g_{t->t+s}(psi_t p).
            g += r.g;
            traj.push_back(x);
            ex.push_back(g);
        }
        iso.trajectories.push_back(std::move(traj));
        iso.exponents.push_back(std::move(ex));
    }
    return iso;
}

FlowResult linear_z_flow(const TriadChart& chart, const Vec& p, double from, double to) {
    chart.check(p);
    const double s = std::exp(-(to - from));
    FlowResult r;
    r.point = p;
    r.D = Mat::Identity(p.size(), p.size());
    for (int i = 0; i < chart.n(); ++i) {
        r.point(chart.iy(i)) *= s;
        r.D(chart.iy(i), chart.iy(i)) = s;
    }
    r.point(chart.iz()) *= s;
    r.D(chart.iz(), chart.iz()) = s;
    r.g = -(to - from);
    return r;
}

double conformal_exponent_inverse_check(const ContactIsotopy& iso, const Vec& p, double t) {
    const FlowResult back = iso.transport(p, t, 0.0);
    const FlowResult fwd = iso.transport(back.point, 0.0, t);
    return std::abs(back.g + fwd.g);
}

double conformal_exponent_composition_check(const ContactIsotopy& psi, const ContactIsotopy& phi,
                                            const Vec& p) {
    const FlowResult a = phi.transport(p, 0.0, 1.0, true);
    const FlowResult b = psi.transport(a.point, 0.0, 1.0, true);
    const TriadChart& chart = psi.chart();
    const Vec R = chart.reeb(p);
    const double via_differential = std::log(chart.lambda(b.point, b.D * (a.D * R)) / chart.lambda(p, R));
    return std::abs(via_differential - (b.g + a.g));
}

double pullback_residual(const ContactIsotopy& iso, double t, const Vec& p, const Vec& v) {
    const FlowResult r = iso.transport(p, 0.0, t, true);
    const TriadChart& chart = iso.chart();
    return std::abs(chart.lambda(r.point, r.D * v) - std::exp(r.g) * chart.lambda(p, v));
}

Vec ReebChord::at(const ContactIsotopy& iso, double t) const {
    Vec x = q;
    x(x.size() - 1) += T * t;
    return iso.phi(t, x);
}

PathGamma ReebChord::path(const ContactIsotopy& iso, int N) const {
    return PathGamma::sample(iso.chart().n(), N, [&](double t) { return at(iso, t); });
}

ReebChord find_chord(const ContactIsotopy& iso, const LegendrianSpec& R0, const LegendrianSpec& R1,
                     const Vec& anchor, double tol) {
    const TriadChart& chart = iso.chart();
    ReebChord c;
    c.p = R0.at(anchor);
    c.q = iso.transport(c.p, 0.0, 1.0).point;
    const int d = chart.dim();
    const Mat& Q = R1.orthonormal_basis();
    const Mat P = Mat::Identity(d, d) - Q * Q.transpose();
    const Vec Pe = P * chart.reeb(c.q);
    const Vec r0 = P * (c.q - R1.point());
    c.T = -Pe.dot(r0) / Pe.squaredNorm();
    c.defect = (r0 + c.T * Pe).norm();
    if (!(c.defect <= tol)) {
        std::ostringstream os;
        os << "infeasible boundary data: the Reeb orbit through psi^1(R0(" << anchor.transpose()
           << ")) misses R1 by " << c.defect;
        throw Error(os.str());
    }
    return c;
}

LegendrianSpec transport_legendrian(const ContactIsotopy& iso, const LegendrianSpec& R, double from,
                                   double to) {
    const FlowResult r = iso.transport(R.point(), from, to, true);
    return LegendrianSpec::affine(iso.chart(), r.point, r.D * R.tangents(), 1e-8);
}

LiftResult lift_to_hamiltonian_trajectory(const TriadChart& chart, const HamiltonianSpec& H,
                                          const PathGamma& gamma, double pi_threshold) {
    LiftResult out;
    out.pi_residual = critical_residual(chart, H, gamma);
    if (out.pi_residual > pi_threshold)
        throw PreconditionError("critical (pi) residual", out.pi_residual, pi_threshold);

    const int N = gamma.intervals();
    if (N < 4) throw Error("lifting needs at least 4 path intervals");
    const double h = gamma.dt();
    auto velocity = [&](const std::vector<Vec>& pts, int k) {
        return grid_derivative4([&](int m) -> const Vec& { return pts[m]; }, k, N, h);
    };
    std::vector<double> b(N + 1), db(N + 1);
    for (int k = 0; k <= N; ++k)
        b[k] = chart.lambda(gamma.points[k], velocity(gamma.points, k)) + H.H(gamma.t(k), gamma.points[k]);
    for (int k = 0; k <= N; ++k) db[k] = grid_derivative4([&](int m) { return b[m]; }, k, N, h);
    // Cumulative trapezoid with the Euler-Maclaurin end correction, fourth order.
    out.rho.assign(N + 1, 0.0);
    double trap = 0.0;
    for (int k = 1; k <= N; ++k) {
        trap += 0.5 * h * (b[k - 1] + b[k]);
        out.rho[k] = trap - h * h / 12.0 * (db[k] - db[0]);
    }

    std::vector<Vec> pts;
    for (int k = 0; k <= N; ++k) pts.push_back(chart.reeb_flow(gamma.points[k], -out.rho[k]));
    out.tilde_gamma = PathGamma(gamma.n, std::move(pts));

    auto rho_samples = out.rho;
    auto rho = [rho_samples, N](double t) {
        const double s = std::clamp(t, 0.0, 1.0) * N;
        const int k = std::min(static_cast<int>(s), N - 1);
        const double w = s - k;
        return (1.0 - w) * rho_samples[k] + w * rho_samples[k + 1];
    };
    out.tilde_H = H.reeb_translated(rho);

    double worst = 0.0;
    for (int k = 0; k <= N; ++k) {
        const Vec& x = out.tilde_gamma.points[k];
        const Vec r = velocity(out.tilde_gamma.points, k) - hamiltonian_vector_field(chart, out.tilde_H, gamma.t(k), x);
        worst = std::max(worst, chart.norm(x, r));
    }
    out.residual = worst;
    return out;
}

}  // namespace contacton
