#include "contacton/families.hpp"

#include <cmath>

namespace contacton {

StripMap holomorphic_lift(const std::vector<HoloFn>& f, const HoloFn& h) {
    const int n = static_cast<int>(f.size());
    if (n < 1 || n > kMaxN) throw DimensionError("holomorphic lift needs 1..3 components");
    return [f, h, n](double tau, double t) {
        const Complex w(tau, t);
        Vec u(2 * n + 1);
        for (int i = 0; i < n; ++i) {
            const Complex v = f[i](w);
            u(i) = v.real();
            u(n + i) = v.imag();
        }
        u(2 * n) = h(w).real();
        return u;
    };
}

StripMap default_holomorphic_lift(int n) {
    std::vector<HoloFn> f;
    f.push_back([](Complex w) { return w + 0.25 * std::sin(w); });
    if (n >= 2) f.push_back([](Complex w) { return 0.3 * std::exp(0.5 * w); });
    if (n >= 3) f.push_back([](Complex w) { return 0.2 * w * w; });
    return holomorphic_lift(f, [](Complex w) { return 0.4 * std::cos(w) + Complex(0.0, 0.3) * w * w; });
}

StripMap legendrian_lift() {
    return [](double tau, double t) {
        Vec u(3);
        u << tau, t, tau * t;
        return u;
    };
}

LegendrianSpec legendrian_lift_R0(const TriadChart& chart) {
    Vec p = Vec::Zero(3);
    Mat V(3, 1);
    V << 1.0, 0.0, 0.0;
    return LegendrianSpec::affine(chart, p, V);
}

LegendrianSpec legendrian_lift_R1(const TriadChart& chart) {
    Vec p(3);
    p << 0.0, 1.0, 0.0;
    Mat V(3, 1);
    V << 1.0, 0.0, 1.0;
    return LegendrianSpec::affine(chart, p, V);
}

StripMap reeb_strip(const Vec& x0, double T, double z0) {
    const int n = static_cast<int>(x0.size());
    return [x0, T, z0, n](double, double t) {
        Vec u = Vec::Zero(2 * n + 1);
        u.head(n) = x0;
        u(2 * n) = z0 + T * t;
        return u;
    };
}

LegendrianSpec x_plane(const TriadChart& chart, double z) {
    const int n = chart.n();
    Vec p = Vec::Zero(chart.dim());
    p(chart.iz()) = z;
    Mat V = Mat::Zero(chart.dim(), n);
    for (int i = 0; i < n; ++i) V(chart.ix(i), i) = 1.0;
    return LegendrianSpec::affine(chart, p, V);
}

StripMap linear_z_cr_family(double A, double theta, const HoloFn& h) {
    const double a = 0.5 * std::sin(theta), b = 0.5 * (1.0 + std::cos(theta));
    if (std::abs(a) < 1e-12) throw Error("linear_z family needs sin(theta) != 0");
    return [A, a, b, h](double tau, double t) {
        const double y = A * std::exp(a * tau + (b - 1.0) * t);
        Vec u(3);
        u << (b / a) * y, y, h(Complex(tau, t)).real();
        return u;
    };
}

StripMap non_harmonic_lift(int n) {
    return [n](double tau, double t) {
        Vec u = Vec::Zero(2 * n + 1);
        u(0) = tau;
        u(n) = t;
        u(2 * n) = tau * tau;
        return u;
    };
}

StripMap anti_holomorphic_map(int n) {
    return [n](double tau, double t) {
        Vec u = Vec::Zero(2 * n + 1);
        u(0) = tau;
        u(n) = -t;
        return u;
    };
}

MapField gauge_transformed(const ContactIsotopy& iso, const StripGrid& grid, const StripMap& ubar,
                           std::optional<LegendrianSpec> R0, std::optional<LegendrianSpec> R1) {
    MapField bar = MapField::sample(grid, iso.chart().n(), ubar);
    bar.R0 = std::move(R0);
    bar.R1 = std::move(R1);
    return gauge_transform(iso, bar, GaugeDirection::ToPerturbed);
}

namespace {

struct SineModes {
    Eigen::Matrix<double, kMaxDim, 3> a, w, ph;
    Vec operator()(int d, double t) const {
        Vec v = Vec::Zero(d);
        for (int c = 0; c < d; ++c)
            for (int k = 0; k < 3; ++k) v(c) += a(c, k) * std::sin(w(c, k) * t + ph(c, k));
        return v;
    }
};

SineModes random_modes(int d, std::mt19937& rng, double amplitude) {
    std::uniform_real_distribution<double> U(-1.0, 1.0), W(0.5, 4.0), P(0.0, 6.283185307179586);
    SineModes m;
    m.a.setZero();
    m.w.setZero();
    m.ph.setZero();
    for (int c = 0; c < d; ++c)
        for (int k = 0; k < 3; ++k) {
            m.a(c, k) = amplitude * U(rng) / (k + 1);
            m.w(c, k) = W(rng) * (k + 1);
            m.ph(c, k) = P(rng);
        }
    return m;
}

}  // namespace

PathGamma random_path(int n, int N, std::mt19937& rng, double amplitude) {
    const int d = 2 * n + 1;
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Vec p0(d);
    for (int c = 0; c < d; ++c) p0(c) = U(rng);
    const SineModes m = random_modes(d, rng, amplitude);
    return PathGamma::sample(n, N, [&](double t) -> Vec { return p0 + m(d, t); });
}

VariationField random_variation(const PathGamma& g, std::mt19937& rng, bool tangent_to_tags) {
    const int d = 2 * g.n + 1, N = g.intervals();
    const SineModes m = random_modes(d, rng, 1.0);
    VariationField v;
    for (int k = 0; k <= N; ++k) v.eta.push_back(m(d, g.t(k)));
    if (tangent_to_tags) {
        if (!g.R0 || !g.R1) throw Error("tangent variation needs both Legendrian tags");
        // (1 - t) e0 + t e1 + t (1 - t) m(t) with e0, e1 tangent to the tags.
        const Vec e0 = g.R0->project_tangent(v.eta.front()), e1 = g.R1->project_tangent(v.eta.back());
        for (int k = 0; k <= N; ++k) {
            const double t = g.t(k);
            v.eta[k] = (1.0 - t) * e0 + t * e1 + t * (1.0 - t) * v.eta[k];
        }
    }
    return v;
}

}  // namespace contacton
