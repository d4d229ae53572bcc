#include "contacton/action.hpp"

#include <cmath>

namespace contacton {

namespace {

double trapezoid(const std::vector<double>& f, double h) {
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
    return s * h;
}

}  // namespace

double action_value(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                    const PathGamma& gamma) {
    const int N = gamma.intervals();
    std::vector<double> f(N + 1);
    for (int k = 0; k <= N; ++k) {
        const double t = gamma.t(k);
        const Vec& p = gamma.points[k];
        f[k] = std::exp(iso.g_Hu(t, p)) * (chart.lambda(p, gamma.velocity(k)) + H.H(t, p));
    }
    return trapezoid(f, gamma.dt());
}

double action_unperturbed(const TriadChart& chart, const PathGamma& gamma) {
    const int N = gamma.intervals();
    std::vector<double> f(N + 1);
    for (int k = 0; k <= N; ++k) f[k] = chart.lambda(gamma.points[k], gamma.velocity(k));
    return trapezoid(f, gamma.dt());
}

PathGamma gauge_path(const ContactIsotopy& iso, const PathGamma& gamma) {
    std::vector<Vec> pts;
    for (int k = 0; k <= gamma.intervals(); ++k) pts.push_back(iso.phi_inverse(gamma.t(k), gamma.points[k]));
    return PathGamma(gamma.n, std::move(pts));
}

double action_identity_residual(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                                const PathGamma& gamma) {
    return std::abs(action_value(chart, H, iso, gamma) - action_unperturbed(chart, gauge_path(iso, gamma)));
}

FirstVariation first_variation(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                               const PathGamma& gamma, const VariationField& eta) {
    const int N = gamma.intervals();
    if (static_cast<int>(eta.eta.size()) != N + 1) throw DimensionError("variation field length differs from path");
    const int d = chart.dim();
    const bool flat_exponent = H.reeb_constant_in_space();
    std::vector<double> f(N + 1);
    for (int k = 0; k <= N; ++k) {
        const double t = gamma.t(k);
        const Vec& p = gamma.points[k];
        const Vec& e = eta.eta[k];
        const Vec w = gamma.velocity(k) - contact_field(chart, H, t, p);
        double integrand = chart.dlambda(e, w);
        if (!flat_exponent) {
            const double hg = 1e-5;
            Vec dg(d);
            for (int a = 0; a < d; ++a) {
                Vec s = Vec::Zero(d);
                s(a) = hg;
                dg(a) = (iso.g_Hu(t, p + s) - iso.g_Hu(t, p - s)) / (2.0 * hg);
            }
            integrand += dg.dot(e) * chart.lambda(p, w) - dg.dot(w) * chart.lambda(p, e);
        }
        f[k] = std::exp(iso.g_Hu(t, p)) * integrand;
    }
    FirstVariation v;
    v.interior = trapezoid(f, gamma.dt());
    const Vec& p0 = gamma.points.front();
    v.boundary_end = chart.lambda(gamma.points.back(), eta.eta.back());
    v.weight_start = std::exp(iso.exponent(p0, 0.0, 1.0));
    v.weight_start_reciprocal = std::exp(iso.exponent(p0, 1.0, 0.0));
    v.boundary_start = v.weight_start * chart.lambda(p0, eta.eta.front());
    return v;
}

double action_difference_quotient(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                                  const PathGamma& gamma, const VariationField& eta, double eps) {
    PathGamma moved = gamma;
    for (std::size_t k = 0; k < moved.points.size(); ++k) moved.points[k] += eps * eta.eta[k];
    return (action_value(chart, H, iso, moved) - action_value(chart, H, iso, gamma)) / eps;
}

double critical_residual(const TriadChart& chart, const HamiltonianSpec& H, const PathGamma& gamma) {
    double worst = 0.0;
    for (int k = 0; k <= gamma.intervals(); ++k) {
        const Vec& p = gamma.points[k];
        const Vec w = gamma.velocity(k) - contact_field(chart, H, gamma.t(k), p);
        worst = std::max(worst, chart.xi_coords(p, w).norm());
    }
    return worst;
}

}  // namespace contacton
