#include "contacton/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <tuple>

namespace contacton {

namespace {

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

enum class NodeKind : unsigned char { Fixed, Free, OnR0, OnR1 };

// Box-scheme residual of the perturbed instanton equations. Unknowns are the interior nodes
// (all coordinates) and the parameters of the boundary-row nodes on R0 and R1, so the
// Legendrian conditions hold exactly; the rows tau0 and tau1 are fixed to chords.
class Problem {
public:
    Problem(const TriadChart& chart, const SolveConfig& cfg, const ContactIsotopy& iso, const MapField& base)
        : chart_(chart), H_(cfg.H), g_(base.grid), R0_(cfg.R0), R1_(cfg.R1), base_(base) {
        const int d = chart.dim(), n = chart.n();
        kind_.assign(g_.nodes(), NodeKind::Fixed);
        offset_.assign(g_.nodes(), -1);
        int next = 0;
        for (int i = 1; i < g_.M; ++i)
            for (int j = 0; j <= g_.N; ++j) {
                const int k = g_.index(i, j);
                kind_[k] = j == 0 ? NodeKind::OnR0 : j == g_.N ? NodeKind::OnR1 : NodeKind::Free;
                offset_[k] = next;
                next += kind_[k] == NodeKind::Free ? d : n;
            }
        size_ = next;

        // Frame components of Pi v do not depend on the base point in the standard chart.
        const Vec origin = Vec::Zero(d);
        P_ = Mat::Zero(2 * n, d);
        Jx_ = Mat::Zero(2 * n, 2 * n);
        for (int c = 0; c < d; ++c) P_.col(c) = chart.xi_coords(origin, Vec::Unit(d, c));
        for (int c = 0; c < 2 * n; ++c) Jx_.col(c) = chart.J_xi(Vec::Unit(2 * n, c));

        w_node_.resize(g_.N + 1);
        w_half_.resize(g_.N);
        for (int j = 0; j <= g_.N; ++j) w_node_[j] = std::exp(iso.exponent(origin, g_.t(j), 1.0));
        for (int j = 0; j < g_.N; ++j) w_half_[j] = std::exp(iso.exponent(origin, g_.t(j) + 0.5 * g_.dt(), 1.0));

        cr_rows_ = 2 * n * g_.M * g_.N;
        rows_ = cr_rows_ + (g_.M - 1) * (g_.N - 1);
    }

    int size() const { return size_; }
    int rows() const { return rows_; }
    int cr_rows() const { return cr_rows_; }

    VectorXd parameters(const MapField& u) const {
        VectorXd th(size_);
        for (int k = 0; k < g_.nodes(); ++k) {
            const int o = offset_[k];
            switch (kind_[k]) {
            case NodeKind::Free: th.segment(o, u.u[k].size()) = u.u[k]; break;
            case NodeKind::OnR0: th.segment(o, R0_.n()) = R0_.parameter(u.u[k]); break;
            case NodeKind::OnR1: th.segment(o, R1_.n()) = R1_.parameter(u.u[k]); break;
            case NodeKind::Fixed: break;
            }
        }
        return th;
    }

    MapField expand(const VectorXd& th) const {
        MapField u = base_;
        for (int k = 0; k < g_.nodes(); ++k) {
            const int o = offset_[k];
            switch (kind_[k]) {
            case NodeKind::Free: u.u[k] = th.segment(o, u.u[k].size()); break;
            case NodeKind::OnR0: u.u[k] = R0_.at(th.segment(o, R0_.n())); break;
            case NodeKind::OnR1: u.u[k] = R1_.at(th.segment(o, R1_.n())); break;
            case NodeKind::Fixed: break;
            }
        }
        return u;
    }

    // Area-weighted residual; the Jacobian with respect to the parameters when J is given.
    VectorXd residual(const MapField& u, SpMat* J) const {
        const int n = chart_.n();
        const double ht = g_.dtau(), hs = g_.dt(), sa = std::sqrt(ht * hs);
        VectorXd r(rows_);
        std::vector<Eigen::Triplet<double>> trip;
        if (J) trip.reserve(static_cast<std::size_t>(rows_) * 12 * chart_.dim());

        auto add = [&](int row, int node, const Vec& grad) {
            const int o = offset_[node];
            switch (kind_[node]) {
            case NodeKind::Fixed: return;
            case NodeKind::Free:
                for (int c = 0; c < grad.size(); ++c)
                    if (grad(c) != 0.0) trip.emplace_back(row, o + c, grad(c));
                return;
            case NodeKind::OnR0:
            case NodeKind::OnR1: {
                const Mat& V = kind_[node] == NodeKind::OnR0 ? R0_.tangents() : R1_.tangents();
                const Vec gv = V.transpose() * grad;
                for (int c = 0; c < gv.size(); ++c)
                    if (gv(c) != 0.0) trip.emplace_back(row, o + c, gv(c));
                return;
            }
            }
        };

        for (int i = 0; i < g_.M; ++i)
            for (int j = 0; j < g_.N; ++j) {
                const int a = g_.index(i, j), b = g_.index(i + 1, j), c = g_.index(i, j + 1),
                          e = g_.index(i + 1, j + 1);
                const Vec mid = 0.25 * (u.u[a] + u.u[b] + u.u[c] + u.u[e]);
                const Vec ut = (u.u[b] + u.u[e] - u.u[a] - u.u[c]) / (2.0 * ht);
                const Vec us = (u.u[c] + u.u[e] - u.u[a] - u.u[b]) / (2.0 * hs);
                const double t = g_.t(j) + 0.5 * hs;
                const Vec X = contact_field(chart_, H_, t, mid);
                const int row0 = (i * g_.N + j) * 2 * n;
                r.segment(row0, 2 * n) = sa * 0.5 * (P_ * ut + Jx_ * (P_ * (us - X)));
                if (!J) continue;
                const Mat DX = contact_field_jacobian(chart_, H_, t, mid);
                const Mat JP = Jx_ * P_;
                const Mat JPDX = 0.25 * (JP * DX);
                const std::array<int, 4> nodes{a, b, c, e};
                const std::array<double, 4> ct{-1.0, 1.0, -1.0, 1.0}, cs{-1.0, -1.0, 1.0, 1.0};
                for (int q = 0; q < 4; ++q) {
                    const Mat D = sa * 0.5 * (ct[q] / (2.0 * ht) * P_ + cs[q] / (2.0 * hs) * JP - JPDX);
                    for (int k = 0; k < 2 * n; ++k) add(row0 + k, nodes[q], D.row(k).transpose());
                }
            }

        for (int i = 1; i < g_.M; ++i)
            for (int j = 1; j < g_.N; ++j) {
                const int row = cr_rows_ + (i - 1) * (g_.N - 1) + (j - 1);
                const int k = g_.index(i, j), kE = g_.index(i + 1, j), kW = g_.index(i - 1, j),
                          kN = g_.index(i, j + 1), kS = g_.index(i, j - 1);
                const Face E = face(u.u[k], u.u[kE], ht, g_.t(j), w_node_[j], false);
                const Face W = face(u.u[kW], u.u[k], ht, g_.t(j), w_node_[j], false);
                const Face Nf = face(u.u[k], u.u[kN], hs, g_.t(j) + 0.5 * hs, w_half_[j], true);
                const Face S = face(u.u[kS], u.u[k], hs, g_.t(j) - 0.5 * hs, w_half_[j - 1], true);
                r(row) = -sa * ((E.val - W.val) / ht + (Nf.val - S.val) / hs);
                if (!J) continue;
                add(row, kE, -sa / ht * E.ghi);
                add(row, kW, sa / ht * W.glo);
                add(row, kN, -sa / hs * Nf.ghi);
                add(row, kS, sa / hs * S.glo);
                add(row, k, -sa * ((E.glo - W.ghi) / ht + (Nf.glo - S.ghi) / hs));
            }

        if (J) {
            J->resize(rows_, size_);
            J->setFromTriplets(trip.begin(), trip.end());
        }
        return r;
    }

private:
    struct Face {
        double val = 0.0;
        Vec glo, ghi;
    };

    // e^g (lambda(m)(delta) [+ H(t, m)]) on the edge lo -> hi, m the midpoint, delta = (hi - lo)/h.
    Face face(const Vec& lo, const Vec& hi, double h, double t, double w, bool with_H) const {
        const Vec m = 0.5 * (lo + hi), delta = (hi - lo) / h;
        const Vec row = chart_.lambda_row(m);
        Vec dp = Vec::Zero(m.size());
        for (int i = 0; i < chart_.n(); ++i) dp(chart_.iy(i)) = -delta(chart_.ix(i));
        Face f;
        f.val = row.dot(delta);
        f.ghi = 0.5 * dp + row / h;
        f.glo = 0.5 * dp - row / h;
        if (with_H) {
            f.val += H_.H(t, m);
            const Vec dH = H_.dH(t, m);
            f.ghi += 0.5 * dH;
            f.glo += 0.5 * dH;
        }
        f.val *= w;
        f.ghi *= w;
        f.glo *= w;
        return f;
    }

    const TriadChart& chart_;
    HamiltonianSpec H_;
    StripGrid g_;
    LegendrianSpec R0_, R1_;
    MapField base_;
    std::vector<NodeKind> kind_;
    std::vector<int> offset_;
    int size_ = 0, rows_ = 0, cr_rows_ = 0;
    Mat P_, Jx_;
    std::vector<double> w_node_, w_half_;
};

void validate(const TriadChart& chart, const SolveConfig& cfg) {
    const int n = chart.n();
    if (cfg.H.n() != n) throw DimensionError("Hamiltonian dimension differs from the chart");
    if (cfg.R0.n() != n || cfg.R1.n() != n) throw DimensionError("boundary Legendrians must be n-dimensional");
    if (cfg.anchor_minus.size() != n || cfg.anchor_plus.size() != n)
        throw DimensionError("chord anchors must have n parameters");
    if (!cfg.H.reeb_constant_in_space())
        throw Error("the solver needs R[H] constant in space (H = 0, constants, z and the like)");
    if (cfg.max_iterations < 0 || cfg.max_backtracks < 1 || !(cfg.target_residual > 0.0) ||
        !(cfg.initial_step > 0.0) || !(cfg.armijo > 0.0 && cfg.armijo < 1.0))
        throw Error("invalid solver settings");
}

std::pair<double, double> split_norms(const VectorXd& r, int cr_rows) {
    return {r.head(cr_rows).norm(), r.tail(r.size() - cr_rows).norm()};
}

}  // namespace

MapField solver_seed(const TriadChart& chart, const SolveConfig& cfg, const ContactIsotopy& iso) {
    validate(chart, cfg);
    const StripGrid& g = cfg.grid;
    MapField u(g, chart.n());
    u.R0 = cfg.R0;
    u.R1 = cfg.R1;
    const ReebChord cm = find_chord(iso, cfg.R0, cfg.R1, cfg.anchor_minus);
    const ReebChord cp = find_chord(iso, cfg.R0, cfg.R1, cfg.anchor_plus);
    const double L = g.tau1 - g.tau0;
    if (cfg.seed == SeedStrategy::LinearChords) {
        std::vector<Vec> gm, gp;
        for (int j = 0; j <= g.N; ++j) {
            gm.push_back(cm.at(iso, g.t(j)));
            gp.push_back(cp.at(iso, g.t(j)));
        }
        for (int i = 0; i <= g.M; ++i) {
            const double s = (g.tau(i) - g.tau0) / L;
            for (int j = 0; j <= g.N; ++j) u.at(i, j) = (1.0 - s) * gm[j] + s * gp[j];
        }
    } else {
        // Interpolate the unperturbed chords q + T t R, then push forward by phi_H^t.
        for (int i = 0; i <= g.M; ++i) {
            const double s = (g.tau(i) - g.tau0) / L;
            for (int j = 0; j <= g.N; ++j) {
                const double t = g.t(j);
                Vec bar = (1.0 - s) * cm.q + s * cp.q;
                bar(chart.iz()) += ((1.0 - s) * cm.T + s * cp.T) * t;
                u.at(i, j) = iso.phi(t, bar);
            }
        }
    }
    for (int i = 0; i <= g.M; ++i) {
        u.at(i, 0) = cfg.R0.project(u.at(i, 0));
        u.at(i, g.N) = cfg.R1.project(u.at(i, g.N));
    }
    return u;
}

SolveResult solve(const TriadChart& chart, const SolveConfig& cfg) {
    validate(chart, cfg);
    const ContactIsotopy iso(chart, cfg.H, cfg.isotopy_steps);
    MapField seed = solver_seed(chart, cfg, iso);
    const StripGrid& g = cfg.grid;
    const int d = chart.dim();

    // Interior bumps vanishing on the boundary of the strip.
    if (cfg.perturbation != 0.0) {
        std::mt19937 rng(cfg.rng_seed);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<Vec> dir(3, Vec::Zero(d));
        for (auto& v : dir)
            for (int c = 0; c < d; ++c) v(c) = U(rng);
        const double L = g.tau1 - g.tau0;
        for (int i = 1; i < g.M; ++i)
            for (int j = 1; j < g.N; ++j) {
                const double s = M_PI * (g.tau(i) - g.tau0) / L, t = M_PI * g.t(j);
                const Vec bump = std::sin(s) * std::sin(t) * dir[0] + std::sin(2.0 * s) * std::sin(t) * dir[1] +
                                 std::sin(s) * std::sin(2.0 * t) * dir[2];
                seed.at(i, j) += cfg.perturbation * bump;
            }
    }

    const Problem prob(chart, cfg, iso, seed);
    VectorXd th = prob.parameters(seed);
    SpMat J;
    VectorXd r = prob.residual(prob.expand(th), &J);
    double F = 0.5 * r.squaredNorm();

    SolveReport rep;
    rep.objective_initial = F;
    auto record = [&](int it, double step) {
        const auto [cr, cl] = split_norms(r, prob.cr_rows());
        rep.history.push_back({it, F, cr, cl, step});
        return cr <= cfg.target_residual && cl <= cfg.target_residual;
    };

    Eigen::SimplicialLDLT<SpMat> precond;
    auto refresh = [&] {
        SpMat JtJ = SpMat(J.transpose()) * J;
        double diag = 0.0;
        for (int k = 0; k < JtJ.rows(); ++k) diag = std::max(diag, JtJ.coeff(k, k));
        for (int k = 0; k < JtJ.rows(); ++k) JtJ.coeffRef(k, k) += 1e-12 * diag;
        precond.compute(JtJ);
        if (precond.info() != Eigen::Success) throw Error("solver preconditioner factorization failed");
    };
    auto apply = [&](const VectorXd& grad) -> VectorXd {
        return cfg.precondition ? VectorXd(precond.solve(grad)) : grad;
    };

    if (cfg.precondition && prob.size() > 0) refresh();
    VectorXd grad = J.transpose() * r;
    VectorXd z = apply(grad);
    VectorXd dir = -z;
    rep.status = "max_iterations";
    bool done = record(0, 0.0);
    if (done) rep.status = "converged";
    double F_window = F;
    int it = 0;
    while (!done && it < cfg.max_iterations) {
        ++it;
        double slope = grad.dot(dir);
        if (!(slope < 0.0)) {
            dir = -z;
            slope = grad.dot(dir);
        }
        if (!(slope < 0.0)) {
            rep.status = "stalled";
            break;
        }
        // Minimizer of the Gauss-Newton model along dir, capped by the configured step.
        const VectorXd Jd = J * dir;
        double alpha = std::min(cfg.initial_step, -slope / std::max(Jd.squaredNorm(), 1e-300));
        bool accepted = false;
        VectorXd th_new, r_new;
        double F_new = F;
        for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
            th_new = th + alpha * dir;
            r_new = prob.residual(prob.expand(th_new), nullptr);
            F_new = 0.5 * r_new.squaredNorm();
            if (std::isfinite(F_new) && F_new <= F + cfg.armijo * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            rep.status = "line_search_failure";
            break;
        }
        th = th_new;
        r = prob.residual(prob.expand(th), &J);
        F = 0.5 * r.squaredNorm();
        if (cfg.precondition && cfg.precondition_refresh > 0 && it % cfg.precondition_refresh == 0) refresh();
        const VectorXd grad_new = J.transpose() * r;
        const VectorXd z_new = apply(grad_new);
        const double beta = std::max(0.0, z_new.dot(grad_new - grad) / std::max(z.dot(grad), 1e-300));
        dir = -z_new + beta * dir;
        grad = grad_new;
        z = z_new;
        if (record(it, alpha)) {
            rep.status = "converged";
            done = true;
        } else if (it % 10 == 0) {
            if (F > (1.0 - 1e-10) * F_window) {
                rep.status = "stalled";
                break;
            }
            F_window = F;
        }
    }

    SolveResult out;
    out.field = prob.expand(th);
    out.field.attach_exponents(iso);
    rep.iterations = it;
    rep.objective = F;
    std::tie(rep.cr_l2, rep.closed_l2) = split_norms(r, prob.cr_rows());
    const MapField& u = out.field;
    rep.residuals = strip_residuals(chart, cfg.H, iso, u);
    rep.boundary_defect = u.boundary_defect();
    rep.energy = pi_energy(chart, cfg.H, iso, u);
    rep.plus = asymptotic_action_charge(chart, cfg.H, iso, u, g.tau1, StripEnd::Positive);
    rep.minus = asymptotic_action_charge(chart, cfg.H, iso, u, g.tau0, StripEnd::Negative);
    rep.action_plus = action_value(chart, cfg.H, iso, row_path(u, g.M));
    rep.action_minus = action_value(chart, cfg.H, iso, row_path(u, 0));
    rep.action_gap = rep.action_plus - rep.action_minus;
    rep.defect = std::abs(rep.energy - rep.action_gap);
    rep.chord_T_minus = find_chord(iso, cfg.R0, cfg.R1, cfg.anchor_minus).T;
    rep.chord_T_plus = find_chord(iso, cfg.R0, cfg.R1, cfg.anchor_plus).T;
    out.report = std::move(rep);
    return out;
}

ChordFit fit_chord_slice(const TriadChart& chart, const ContactIsotopy& iso, const MapField& u,
                         const LegendrianSpec& R0, int row, double threshold) {
    const StripGrid& g = u.grid;
    if (row < 0 || row > g.M) throw Error("chord fit row outside the grid");
    const int n = chart.n(), d = chart.dim(), N = g.N;
    const int P = n + 1;

    auto model = [&](const Eigen::VectorXd& prm) {
        Vec q = iso.transport(R0.at(prm.head(n)), 0.0, 1.0).point;
        Eigen::VectorXd out(d * (N + 1));
        for (int j = 0; j <= N; ++j) {
            Vec x = q;
            x(chart.iz()) += prm(n) * g.t(j);
            out.segment(j * d, d) = iso.phi(g.t(j), x);
        }
        return out;
    };
    Eigen::VectorXd target(d * (N + 1));
    for (int j = 0; j <= N; ++j) target.segment(j * d, d) = u.at(row, j);

    ChordFit fit;
    fit.row = row;
    fit.tau = g.tau(row);
    const StripEnd end = 2 * row >= g.M ? StripEnd::Positive : StripEnd::Negative;
    const ActionCharge ac = asymptotic_action_charge(chart, iso.hamiltonian(), iso, u, fit.tau, end);
    fit.T_H = ac.T_H;
    fit.Q_H = ac.Q_H;

    Eigen::VectorXd prm(P);
    prm.head(n) = R0.parameter(u.at(row, 0));
    prm(n) = ac.slice_action;
    Eigen::VectorXd res = model(prm) - target;
    for (int iter = 0; iter < 8; ++iter) {
        Eigen::MatrixXd Jm(res.size(), P);
        for (int c = 0; c < P; ++c) {
            Eigen::VectorXd hp = prm;
            hp(c) += 1e-6;
            Jm.col(c) = (model(hp) - target - res) / 1e-6;
        }
        const Eigen::VectorXd step = Jm.colPivHouseholderQr().solve(-res);
        prm += step;
        res = model(prm) - target;
        if (step.norm() < 1e-12) break;
    }
    fit.s = prm.head(n);
    fit.T = prm(n);
    double e = 0.0;
    for (int j = 0; j <= N; ++j) e = std::max(e, res.segment(j * d, d).norm());
    fit.fit_error = e;
    fit.ok = e <= threshold;
    return fit;
}

AsymptoticDiagnostics asymptotic_diagnostics(const TriadChart& chart, const ContactIsotopy& iso,
                                             const MapField& u, const LegendrianSpec& R0, int sequence_length,
                                             double threshold) {
    const int M = u.grid.M;
    AsymptoticDiagnostics dg;
    dg.plus = fit_chord_slice(chart, iso, u, R0, M, threshold);
    dg.minus = fit_chord_slice(chart, iso, u, R0, 0, threshold);
    const int L = std::max(sequence_length, 2);
    double qmin = dg.plus.Q_H, qmax = dg.plus.Q_H;
    for (int k = 0; k < L; ++k) {
        const int row = M / 2 + static_cast<int>(std::lround(static_cast<double>(k) * (M - M / 2) / (L - 1)));
        ChordFit f = row == M ? dg.plus : fit_chord_slice(chart, iso, u, R0, row, threshold);
        qmin = std::min(qmin, f.Q_H);
        qmax = std::max(qmax, f.Q_H);
        dg.sequence.push_back(std::move(f));
    }
    dg.Q_drift = qmax - qmin;
    return dg;
}

void write_iteration_csv(std::ostream& os, const SolveReport& r) {
    os << "iter,objective,cr_l2,closed_l2,step\n" << std::setprecision(12);
    for (const auto& h : r.history)
        os << h.iter << ',' << h.objective << ',' << h.cr_l2 << ',' << h.closed_l2 << ',' << h.step << '\n';
}

}  // namespace contacton
