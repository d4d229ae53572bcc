#pragma once

#include "contacton/report.hpp"
#include "contacton/triad.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace contacton {

// Gamma^k_{ij} in the coordinate frame: nabla_{d_i} d_j = Gamma^k_{ij} d_k.
struct ConnectionCoeffs {
    Vec base;
    int dim = 0;
    std::array<double, kMaxDim * kMaxDim * kMaxDim> G{};

    ConnectionCoeffs() = default;
    ConnectionCoeffs(Vec p, int d) : base(std::move(p)), dim(d) {}

    double& operator()(int k, int i, int j) { return G[(k * kMaxDim + i) * kMaxDim + j]; }
    double operator()(int k, int i, int j) const { return G[(k * kMaxDim + i) * kMaxDim + j]; }

    // Gamma(X, Y)^k = Gamma^k_{ij} X^i Y^j.
    Vec contract(const Vec& X, const Vec& Y) const;
};

using ConnectionProvider = std::function<ConnectionCoeffs(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;

struct TorsionSample {
    Vec base;
    std::vector<std::pair<Vec, Vec>> pairs;
    std::vector<Vec> T;
    std::vector<Vec> T_pi;
};

// Closed form for the standard triad: the frame (e_i, f_i, R) is parallel, which
// in coordinates leaves only nabla_{d_{y_i}} d_{x_i} = -d_z.
ConnectionCoeffs christoffel_at(const TriadChart& chart, const Vec& p);
ConnectionCoeffs christoffel_at(const TriadChart& chart, const TriadPoint& p);
ConnectionProvider standard_connection(const TriadChart& chart);

// Stacks the six axioms as an affine system in Gamma and solves it by least
// squares. Throws if the system is rank deficient.
ConnectionCoeffs christoffel_from_axioms(const TriadChart& chart, const Vec& p);

Vec torsion(const ConnectionCoeffs& c, const Vec& v, const Vec& w);
TorsionSample torsion_sample(const TriadChart& chart, const ConnectionCoeffs& c,
                             const std::vector<std::pair<Vec, Vec>>& pairs);

// nabla_X Y at X.base, with the derivative of Y by central differences.
Vec cov_deriv(const TriadChart& chart, const ConnectionCoeffs& c, const TangentVec& X,
              const VectorField& Y, double h);
Vec cov_deriv(const TriadChart& chart, const ConnectionCoeffs& c, const TangentVec& X,
              const VectorField& Y);

// Per-axiom residual vectors at p, evaluated on coordinate and xi-frame bases.
struct AxiomResiduals {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
    double max_abs(std::size_t axiom) const;
};
// Six defining properties only (affine in Gamma).
AxiomResiduals axiom_residuals(const TriadChart& chart, const ConnectionCoeffs& c);
// Six properties plus the two consequences (nabla R formula, lambda(T|xi) = dlambda).
AxiomResiduals axiom_and_corollary_residuals(const TriadChart& chart, const ConnectionCoeffs& c);

ResidualReport verify_triad_axioms(const TriadChart& chart, const ConnectionProvider& coeffs,
                                   int samples, unsigned seed = 1, double tol = 1e-6);

// R(d_i, d_j) d_l = Riem[k][l][i][j] d_k, from central differences of Gamma.
struct RiemannSample {
    Vec base;
    int dim = 0;
    std::vector<double> R;
    double operator()(int k, int l, int i, int j) const {
        return R[((k * dim + l) * dim + i) * dim + j];
    }
    // R(X, Y) Z
    Vec apply(const Vec& X, const Vec& Y, const Vec& Z) const;
};
RiemannSample riemann_at(const ConnectionProvider& coeffs, const Vec& p, double h);

// Matrix A with nabla^pi_X (sum c_b E_b) = sum (X c_b + A_ab c_b) E_a in the unitary xi-frame.
Mat xi_connection_matrix(const TriadChart& chart, const ConnectionCoeffs& c, const Vec& X);

}  // namespace contacton
