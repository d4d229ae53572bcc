#include "contacton/hamiltonian.hpp"

#include <array>
#include <memory>

namespace contacton {

namespace {

std::vector<std::string> variable_names(int n) {
    std::vector<std::string> v{"t"};
    for (int i = 1; i <= n; ++i) v.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) v.push_back("y" + std::to_string(i));
    v.push_back("z");
    if (n == 1) {
        v.push_back("x");
        v.push_back("y");
    }
    return v;
}

struct ExprBundle {
    int n;
    Expression H;
    std::vector<Expression> dH;
    Expression RH;

    std::array<double, 2 * kMaxDim + 2> values(double t, const Vec& p) const {
        std::array<double, 2 * kMaxDim + 2> v{};
        v[0] = t;
        for (int k = 0; k < 2 * n + 1; ++k) v[1 + k] = p(k);
        if (n == 1) {
            v[4] = p(0);
            v[5] = p(1);
        }
        return v;
    }
};

}  // namespace

HamiltonianSpec HamiltonianSpec::constant(int n, double c) {
    HamiltonianSpec h;
    h.kind_ = Kind::Constant;
    h.tag_ = "constant";
    h.n_ = n;
    h.c_ = c;
    const int d = 2 * n + 1;
    h.H_ = [c](double, const Vec&) { return c; };
    h.dH_ = [d](double, const Vec&) -> Vec { return Vec::Zero(d); };
    h.hess_ = [d](double, const Vec&) -> Mat { return Mat::Zero(d, d); };
    h.reeb_zero_ = true;
    h.reeb_space_const_ = true;
    return h;
}

HamiltonianSpec HamiltonianSpec::linear_z(int n) {
    HamiltonianSpec h;
    h.kind_ = Kind::LinearZ;
    h.tag_ = "linear_z";
    h.n_ = n;
    const int d = 2 * n + 1;
    h.H_ = [d](double, const Vec& p) { return p(d - 1); };
    h.dH_ = [d](double, const Vec&) -> Vec {
        Vec g = Vec::Zero(d);
        g(d - 1) = 1.0;
        return g;
    };
    h.hess_ = [d](double, const Vec&) -> Mat { return Mat::Zero(d, d); };
    h.reeb_zero_ = false;
    h.reeb_space_const_ = true;
    return h;
}

HamiltonianSpec HamiltonianSpec::expression(int n, const std::string& H, const std::vector<std::string>& dH,
                                            const std::string& RH) {
    const int d = 2 * n + 1;
    if (static_cast<int>(dH.size()) != d)
        throw Error("expression Hamiltonian needs " + std::to_string(d) + " gradient components");
    const auto names = variable_names(n);
    auto b = std::make_shared<ExprBundle>();
    b->n = n;
    b->H = Expression(H, names);
    for (const auto& s : dH) b->dH.emplace_back(s, names);
    b->RH = Expression(RH, names);

    HamiltonianSpec h;
    h.kind_ = Kind::Expression;
    h.tag_ = "expr";
    h.n_ = n;
    h.H_ = [b](double t, const Vec& p) { return b->H.eval(b->values(t, p).data()); };
    h.dH_ = [b, d](double t, const Vec& p) -> Vec {
        const auto v = b->values(t, p);
        Vec g(d);
        for (int k = 0; k < d; ++k) g(k) = b->dH[k].eval(v.data());
        return g;
    };
    h.RH_ = [b](double t, const Vec& p) { return b->RH.eval(b->values(t, p).data()); };
    // Variable 0 is t; spatial variables are 1..d and the n = 1 aliases.
    bool spatial = false;
    for (int k = 1; k < static_cast<int>(names.size()); ++k) spatial = spatial || b->RH.depends_on(k);
    h.reeb_space_const_ = !spatial;
    h.reeb_zero_ = b->RH.is_constant() && b->RH.eval(b->values(0.0, Vec::Zero(d)).data()) == 0.0;
    return h;
}

HamiltonianSpec HamiltonianSpec::custom(int n, Scalar H, Gradient dH, Hessian hessian, std::string tag,
                                        bool reeb_constant_in_space) {
    HamiltonianSpec h;
    h.kind_ = Kind::Custom;
    h.tag_ = std::move(tag);
    h.n_ = n;
    h.H_ = std::move(H);
    h.dH_ = std::move(dH);
    h.hess_ = std::move(hessian);
    h.reeb_space_const_ = reeb_constant_in_space;
    return h;
}

Mat HamiltonianSpec::hessian(double t, const Vec& p) const {
    if (hess_) return hess_(t, p);
    const int d = static_cast<int>(p.size());
    const double h = 1e-5;
    Mat M(d, d);
    for (int k = 0; k < d; ++k) {
        Vec e = Vec::Zero(d);
        e(k) = h;
        M.col(k) = (dH_(t, p + e) - dH_(t, p - e)) / (2.0 * h);
    }
    return 0.5 * (M + M.transpose());
}

HamiltonianSpec HamiltonianSpec::reeb_translated(std::function<double(double)> rho) const {
    HamiltonianSpec h = *this;
    const int iz = 2 * n_;
    auto shift = [rho, iz](double t, const Vec& x) {
        Vec q = x;
        q(iz) += rho(t);
        return q;
    };
    const HamiltonianSpec base = *this;
    h.kind_ = Kind::Custom;
    h.tag_ = tag_ + "_reeb_translated";
    h.H_ = [base, shift](double t, const Vec& x) { return base.H(t, shift(t, x)); };
    h.dH_ = [base, shift](double t, const Vec& x) { return base.dH(t, shift(t, x)); };
    h.hess_ = [base, shift](double t, const Vec& x) { return base.hessian(t, shift(t, x)); };
    if (RH_) h.RH_ = [base, shift](double t, const Vec& x) { return base.RH(t, shift(t, x)); };
    return h;
}

}  // namespace contacton
