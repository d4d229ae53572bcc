#pragma once

#include "contacton/common.hpp"
#include "contacton/expr.hpp"

#include <functional>
#include <string>
#include <vector>

namespace contacton {

// Time-dependent contact Hamiltonian H(t, p) with its spatial gradient and Hessian.
// Sign convention: the Hamiltonian of a contact field X is -lambda(X).
class HamiltonianSpec {
public:
    enum class Kind { Constant, LinearZ, Expression, Custom };

    using Scalar = std::function<double(double, const Vec&)>;
    using Gradient = std::function<Vec(double, const Vec&)>;
    using Hessian = std::function<Mat(double, const Vec&)>;

    static HamiltonianSpec zero(int n) { return constant(n, 0.0); }
    static HamiltonianSpec constant(int n, double c);
    static HamiltonianSpec linear_z(int n);
    // Variables: t, x1..xn, y1..yn, z (and x, y when n = 1). `dH` lists the
    // partial derivatives in coordinate order; `RH` must equal dH/dz.
    static HamiltonianSpec expression(int n, const std::string& H, const std::vector<std::string>& dH,
                                      const std::string& RH);
    // Arbitrary evaluators; `hessian` may be empty (then central differences of `dH`).
    static HamiltonianSpec custom(int n, Scalar H, Gradient dH, Hessian hessian, std::string tag,
                                  bool reeb_constant_in_space = false);

    // H~(t, x) = H(t, x + rho(t) dz): the pull-back by the Reeb flow for time rho(t).
    HamiltonianSpec reeb_translated(std::function<double(double)> rho) const;

    Kind kind() const { return kind_; }
    const std::string& tag() const { return tag_; }
    int n() const { return n_; }
    double constant_value() const { return c_; }

    double H(double t, const Vec& p) const { return H_(t, p); }
    Vec dH(double t, const Vec& p) const { return dH_(t, p); }
    Mat hessian(double t, const Vec& p) const;
    double RH(double t, const Vec& p) const { return RH_ ? RH_(t, p) : dH_(t, p)(2 * n_); }

    // R[H] vanishes identically: the flow is strict and every conformal exponent is 0.
    bool reeb_invariant() const { return reeb_zero_; }
    // R[H] depends on t only, so conformal exponents are constant in space.
    bool reeb_constant_in_space() const { return reeb_space_const_; }

private:
    Kind kind_ = Kind::Constant;
    std::string tag_;
    int n_ = 1;
    double c_ = 0.0;
    Scalar H_;
    Gradient dH_;
    Hessian hess_;
    Scalar RH_;
    bool reeb_zero_ = false;
    bool reeb_space_const_ = false;
};

}  // namespace contacton
