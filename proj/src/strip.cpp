#include "contacton/strip.hpp"

#include "contacton/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace contacton {

StripGrid::StripGrid(double a, double b, int M_, int N_) : tau0(a), tau1(b), M(M_), N(N_) {
    if (!(b > a)) throw Error("strip grid needs tau1 > tau0");
    if (M < 4 || N < 4) throw Error("strip grid needs at least 4 cells per direction");
}

double StripGrid::weight(int i, int j) const {
    const double wi = (i == 0 || i == M) ? 0.5 : 1.0;
    const double wj = (j == 0 || j == N) ? 0.5 : 1.0;
    return wi * wj * dtau() * dt();
}

MapField::MapField(StripGrid g, int n_) : grid(g), n(n_), u(g.nodes(), Vec::Zero(2 * n_ + 1)) {}

MapField MapField::sample(const StripGrid& g, int n, const std::function<Vec(double, double)>& f) {
    MapField m(g, n);
    for (int i = 0; i <= g.M; ++i)
        for (int j = 0; j <= g.N; ++j) {
            m.at(i, j) = f(g.tau(i), g.t(j));
            if (m.at(i, j).size() != 2 * n + 1) throw DimensionError("sampled map has wrong dimension");
        }
    return m;
}

Vec MapField::d_tau(int i, int j) const {
    return grid_derivative4([&](int k) -> const Vec& { return at(k, j); }, i, grid.M, grid.dtau());
}

Vec MapField::d_t(int i, int j) const {
    return grid_derivative4([&](int k) -> const Vec& { return at(i, k); }, j, grid.N, grid.dt());
}

double MapField::boundary_defect() const {
    double d = 0.0;
    for (int i = 0; i <= grid.M; ++i) {
        if (R0) d = std::max(d, R0->distance(at(i, 0)));
        if (R1) d = std::max(d, R1->distance(at(i, grid.N)));
    }
    return d;
}

void MapField::attach_exponents(const ContactIsotopy& iso) {
    gHu.assign(u.size(), 0.0);
    parallel_for(u.size(), [&](std::size_t k) {
        const int j = static_cast<int>(k) % (grid.N + 1);
        gHu[k] = iso.g_Hu(grid.t(j), u[k]);
    });
}

namespace {

std::vector<double> node_exponents(const ContactIsotopy& iso, const MapField& u) {
    if (u.gHu.size() == u.u.size()) return u.gHu;
    MapField tmp = u;
    tmp.attach_exponents(iso);
    return tmp.gHu;
}

NodeNorms node_norms(const StripGrid& g, const std::vector<double>& sq) {
    NodeNorms r;
    double s = 0.0;
    for (int i = 0; i <= g.M; ++i)
        for (int j = 0; j <= g.N; ++j) {
            const double v = sq[g.index(i, j)];
            s += g.weight(i, j) * v;
            r.max = std::max(r.max, std::sqrt(v));
        }
    r.l2 = std::sqrt(s);
    return r;
}

NodeNorms cell_norms(const StripGrid& g, const std::vector<double>& v) {
    NodeNorms r;
    double s = 0.0;
    for (double x : v) {
        s += x * x;
        r.max = std::max(r.max, std::abs(x));
        if (!std::isfinite(x)) r.max = x;
    }
    r.l2 = std::sqrt(s * g.dtau() * g.dt());
    return r;
}

struct CellData {
    Vec mid, u_tau, u_t;
    double t = 0.0;
};

CellData cell(const MapField& u, int i, int j) {
    const StripGrid& g = u.grid;
    const Vec& a = u.at(i, j);
    const Vec& b = u.at(i + 1, j);
    const Vec& c = u.at(i, j + 1);
    const Vec& d = u.at(i + 1, j + 1);
    CellData r;
    r.mid = 0.25 * (a + b + c + d);
    r.u_tau = (b + d - a - c) / (2.0 * g.dtau());
    r.u_t = (c + d - a - b) / (2.0 * g.dt());
    r.t = g.t(j) + 0.5 * g.dt();
    return r;
}

}  // namespace

DHFields assemble_dH(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u) {
    const StripGrid& g = u.grid;
    const std::size_t K = u.u.size();
    DHFields f;
    f.dH.on_tau.resize(K);
    f.dH.on_t.resize(K);
    f.dH_pi.on_tau.resize(K);
    f.dH_pi.on_t.resize(K);
    f.pi_frame.on_tau.resize(K);
    f.pi_frame.on_t.resize(K);
    f.lambdaH.resize(K);
    f.X.resize(K);
    parallel_for(K, [&](std::size_t k) {
        const int i = static_cast<int>(k) / (g.N + 1), j = static_cast<int>(k) % (g.N + 1);
        const Vec& p = u.u[k];
        const double t = g.t(j);
        f.X[k] = contact_field(chart, H, t, p);
        f.dH.on_tau[k] = u.d_tau(i, j);
        f.dH.on_t[k] = u.d_t(i, j) - f.X[k];
        f.dH_pi.on_tau[k] = chart.project(p, f.dH.on_tau[k]);
        f.dH_pi.on_t[k] = chart.project(p, f.dH.on_t[k]);
        f.pi_frame.on_tau[k] = chart.xi_coords(p, f.dH.on_tau[k]);
        f.pi_frame.on_t[k] = chart.xi_coords(p, f.dH.on_t[k]);
        f.lambdaH[k] = {chart.lambda(p, f.dH.on_tau[k]), chart.lambda(p, f.dH.on_t[k])};
    });
    return f;
}

CRResidual cr_residual(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u) {
    const DHFields f = assemble_dH(chart, H, u);
    CRResidual r;
    r.value.resize(u.u.size());
    std::vector<double> sq(u.u.size());
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        r.value[k] = 0.5 * (f.pi_frame.on_tau[k] + chart.J_xi(f.pi_frame.on_t[k]));
        sq[k] = r.value[k].squaredNorm();
    }
    r.norms = node_norms(u.grid, sq);
    return r;
}

ClosednessResidual closedness_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                       const ContactIsotopy& iso, const MapField& u) {
    const StripGrid& g = u.grid;
    const DHFields f = assemble_dH(chart, H, u);
    const std::vector<double> ex = node_exponents(iso, u);
    std::vector<double> A(u.u.size()), B(u.u.size());
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        const double w = std::exp(ex[k]);
        A[k] = w * f.lambdaH[k][0];
        B[k] = w * f.lambdaH[k][1];
    }
    // The form is e^g (B dtau - A dt); its exterior derivative is -(A_tau + B_t) dtau^dt.
    ClosednessResidual r;
    r.value.resize(static_cast<std::size_t>(g.M) * g.N);
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.N; ++j) {
            const int a = g.index(i, j), b = g.index(i + 1, j), c = g.index(i, j + 1), d = g.index(i + 1, j + 1);
            const double Atau = (A[b] + A[d] - A[a] - A[c]) / (2.0 * g.dtau());
            const double Bt = (B[c] + B[d] - B[a] - B[b]) / (2.0 * g.dt());
            r.value[static_cast<std::size_t>(i) * g.N + j] = -(Atau + Bt);
        }
    r.norms = cell_norms(g, r.value);
    return r;
}

StripResidualReport strip_residuals(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                                    const MapField& u) {
    StripResidualReport r;
    const CRResidual cr = cr_residual(chart, H, u);
    const ClosednessResidual cl = closedness_residual(chart, H, iso, u);
    r.cr_l2 = cr.norms.l2;
    r.cr_max = cr.norms.max;
    r.closed_l2 = cl.norms.l2;
    r.closed_max = cl.norms.max;
    return r;
}

double pi_energy(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso, const MapField& u,
                 int i_begin, int i_end) {
    const StripGrid& g = u.grid;
    if (i_end < 0) i_end = g.M;
    if (i_begin < 0 || i_end > g.M || i_begin > i_end) throw Error("energy cell range outside the grid");
    const int cells = (i_end - i_begin) * g.N;
    std::vector<double> e(static_cast<std::size_t>(std::max(cells, 0)), 0.0);
    parallel_for(e.size(), [&](std::size_t k) {
        const int i = i_begin + static_cast<int>(k) / g.N, j = static_cast<int>(k) % g.N;
        const CellData c = cell(u, i, j);
        const Vec X = contact_field(chart, H, c.t, c.mid);
        const double dens = chart.xi_coords(c.mid, c.u_tau).squaredNorm() +
                            chart.xi_coords(c.mid, c.u_t - X).squaredNorm();
        e[k] = 0.5 * std::exp(iso.g_Hu(c.t, c.mid)) * dens;
    });
    double s = 0.0;
    for (double v : e) s += v;
    return s * g.dtau() * g.dt();
}

MapField gauge_transform(const ContactIsotopy& iso, const MapField& u, GaugeDirection dir) {
    MapField out(u.grid, u.n);
    const StripGrid& g = u.grid;
    const bool down = dir == GaugeDirection::ToUnperturbed;
    parallel_for(u.u.size(), [&](std::size_t k) {
        const double t = g.t(static_cast<int>(k) % (g.N + 1));
        out.u[k] = down ? iso.phi_inverse(t, u.u[k]) : iso.phi(t, u.u[k]);
    });
    // phi^0 = (psi^1)^{-1} and phi^1 = id, so only the t = 0 tag moves.
    if (u.R0) out.R0 = down ? transport_legendrian(iso, *u.R0, 0.0, 1.0) : transport_legendrian(iso, *u.R0, 1.0, 0.0);
    out.R1 = u.R1;
    return out;
}

GaugeEquivalence gauge_equivalence_check(const TriadChart& chart, const HamiltonianSpec& H,
                                         const ContactIsotopy& iso, const MapField& u) {
    GaugeEquivalence r;
    const HamiltonianSpec H0 = HamiltonianSpec::zero(chart.n());
    const ContactIsotopy id(chart, H0, iso.steps());
    r.perturbed = strip_residuals(chart, H, iso, u);
    r.ubar = gauge_transform(iso, u, GaugeDirection::ToUnperturbed);
    r.unperturbed = strip_residuals(chart, H0, id, r.ubar);
    r.energy_perturbed = pi_energy(chart, H, iso, u);
    r.energy_unperturbed = pi_energy(chart, H0, id, r.ubar);
    return r;
}

ActionCharge asymptotic_action_charge(const TriadChart& chart, const HamiltonianSpec& H,
                                      const ContactIsotopy& iso, const MapField& u, double s, StripEnd end) {
    const StripGrid& g = u.grid;
    const double slack = 1e-9 * (g.tau1 - g.tau0);
    if (s < g.tau0 - slack || s > g.tau1 + slack) {
        std::ostringstream os;
        os << "slice tau = " << s << " outside the grid [" << g.tau0 << ", " << g.tau1 << "]";
        throw Error(os.str());
    }
    ActionCharge r;
    r.row = std::clamp(static_cast<int>(std::lround((s - g.tau0) / g.dtau())), 0, g.M);
    double act = 0.0, q = 0.0;
    for (int j = 0; j <= g.N; ++j) {
        const Vec& p = u.at(r.row, j);
        const double t = g.t(j);
        const double w = ((j == 0 || j == g.N) ? 0.5 : 1.0) * g.dt() * std::exp(iso.g_Hu(t, p));
        act += w * (chart.lambda(p, u.d_t(r.row, j)) + H.H(t, p));
        q -= w * chart.lambda(p, u.d_tau(r.row, j));
    }
    r.slice_action = act;
    r.Q_H = q;
    if (end == StripEnd::Positive) {
        r.energy = pi_energy(chart, H, iso, u, r.row, g.M);
        r.T_H = r.energy + act;
    } else {
        r.energy = pi_energy(chart, H, iso, u, 0, r.row);
        r.T_H = act - r.energy;
    }
    return r;
}

PathGamma row_path(const MapField& u, int i) {
    std::vector<Vec> pts;
    for (int j = 0; j <= u.grid.N; ++j) pts.push_back(u.at(i, j));
    PathGamma p(u.n, std::move(pts));
    p.R0 = u.R0;
    p.R1 = u.R1;
    return p;
}

void write_field_csv(std::ostream& os, const MapField& u) {
    os << "tau,t";
    for (int i = 1; i <= u.n; ++i) os << ",x" << i;
    for (int i = 1; i <= u.n; ++i) os << ",y" << i;
    os << ",z\n" << std::setprecision(17);
    for (int i = 0; i <= u.grid.M; ++i)
        for (int j = 0; j <= u.grid.N; ++j) {
            os << u.grid.tau(i) << ',' << u.grid.t(j);
            const Vec& p = u.at(i, j);
            for (int c = 0; c < p.size(); ++c) os << ',' << p(c);
            os << '\n';
        }
}

MapField read_field_csv(std::istream& is, int n) {
    std::string line;
    if (!std::getline(is, line)) throw Error("field CSV is empty");
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != 2 * n + 3) throw Error("field CSV row has wrong column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("field CSV has no rows");
    int N = 0;
    while (N + 1 < static_cast<int>(rows.size()) && rows[N + 1][0] == rows[0][0]) ++N;
    const int stride = N + 1;
    if (rows.size() % stride != 0) throw Error("field CSV is not a full tensor grid");
    const int M = static_cast<int>(rows.size()) / stride - 1;
    MapField m(StripGrid(rows.front()[0], rows.back()[0], M, N), n);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (int c = 0; c < 2 * n + 1; ++c) m.u[k](c) = rows[k][2 + c];
    return m;
}

namespace {

// Explicit little-endian encoding, independent of host byte order.
void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    os.write(b, 4);
}

void put_f64(std::ostream& os, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xff);
    os.write(b, 8);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated field dump");
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b[k]) << (8 * k);
    return v;
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("truncated field dump");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

}  // namespace

void write_field_binary(std::ostream& os, const MapField& u) {
    os.write("CTNF", 4);
    put_u32(os, 1);
    put_u32(os, static_cast<std::uint32_t>(u.grid.M));
    put_u32(os, static_cast<std::uint32_t>(u.grid.N));
    put_u32(os, static_cast<std::uint32_t>(2 * u.n + 1));
    put_f64(os, u.grid.tau0);
    put_f64(os, u.grid.tau1);
    for (const Vec& p : u.u)
        for (int c = 0; c < p.size(); ++c) put_f64(os, p(c));
}

MapField read_field_binary(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "CTNF", 4) != 0) throw Error("not a field dump (bad magic)");
    if (get_u32(is) != 1) throw Error("unsupported field dump version");
    const int M = static_cast<int>(get_u32(is));
    const int N = static_cast<int>(get_u32(is));
    const int dim = static_cast<int>(get_u32(is));
    if (dim % 2 == 0 || dim > kMaxDim) throw DimensionError("field dump has unsupported dimension");
    const double a = get_f64(is), b = get_f64(is);
    MapField m(StripGrid(a, b, M, N), (dim - 1) / 2);
    for (Vec& p : m.u)
        for (int c = 0; c < dim; ++c) p(c) = get_f64(is);
    return m;
}

}  // namespace contacton
