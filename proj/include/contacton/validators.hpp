#pragma once

#include "contacton/connection.hpp"
#include "contacton/strip.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace contacton {

struct ValidatorOptions {
    // Largest admissible CR (and closedness) max-norm; negative means 10 dx^2 scale.
    double onshell_threshold = -1.0;
    bool check_preconditions = true;
    // Identity residual tolerance; negative means 50 dx scale.
    double tolerance = -1.0;
    // Connection used for nabla^pi; empty means the standard triad connection.
    ConnectionProvider connection;
};

// 1 + max |du| over the nodes; the scale in the on-shell thresholds.
double field_scale(const MapField& u);
double default_onshell_threshold(const MapField& u);

// Per-node isothermal data with (x, y) = (tau, t).
struct IsothermalFields {
    std::vector<Vec> zeta;                      // d^pi_H u(d_tau), frame components
    std::vector<std::complex<double>> alpha;    // g + i f
    std::vector<double> f, g;                   // lambda_H(u_tau), lambda_H(u_t)
};
IsothermalFields isothermal_fields(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u);

// The curvature of nabla^pi pulled back by u, F(d_tau, d_t) in the unitary frame, plus the
// pieces that feed the torsion and Lie-derivative terms.
struct CurvatureSample {
    int node = 0;
    Mat F;              // 2n x 2n
    Mat lie_RJ;         // (L_R J) restricted to xi, frame components
    double torsion_pi = 0.0;  // max |T^pi(E_a, E_b)| over frame pairs
};

// d^{nabla pi}(d^pi_H u) minus the four terms on the right of the fundamental equation,
// per cell, with the 2-form side assembled by circulation around each cell.
ResidualReport fundamental_equation_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                             const MapField& u, const ValidatorOptions& opt = {});
// d(u^* lambda_H) - 1/2 |d^pi_H u|^2 dA - u^*(R[H] lambda) ^ dt, per cell.
ResidualReport du_lambdaH_residual(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u,
                                   const ValidatorOptions& opt = {});
// Entries: alpha_dbar (the identity implied by d(u^*lambda_H) and the weighted closedness),
// alpha_dbar_full_G (right side 1/2|zeta|^2 + G, G undivided), alpha_boundary_imag
// (only when tagged), zeta_B_lambda, zeta_B_lambdaH (B built from lambda or lambda_H
// coefficients, with the -nabla(X^pi dt) term kept) and zeta_homogeneous (that term dropped).
ResidualReport isothermal_system_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                          const ContactIsotopy& iso, const MapField& u,
                                          const ValidatorOptions& opt = {});
// Interior nodes: (1/2) Lap |zeta|^2 - |nabla zeta|^2 - <nabla_t W, zeta> + <nabla_tau W, J zeta>
// + <J F zeta, zeta>, W = nabla_tau X^pi_H(u). Entry weitzenbock_vanishing_terms bounds
// |L_R J| and |T^pi|, whose terms are left out of the sum.
ResidualReport weitzenbock_laplacian_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                              const MapField& u, const ValidatorOptions& opt = {},
                                              std::vector<CurvatureSample>* samples = nullptr);

// Inner product / star identity, the metric property of d^nabla and delta^nabla (global
// for interior-supported forms and pointwise), and two assemblies of d^nabla on E-valued
// 1-forms, all on random smooth fields with a random metric connection on E = R^2.
ResidualReport vector_form_calculus_check(const StripGrid& grid, unsigned seed = 7);

// Runs `run` on grid, grid.refined(), ...; entries of level k > 0 get the order measured
// against level k - 1 from their max norms. Orders are left empty when both levels sit at
// round-off (max below `floor`).
struct ConvergenceLevel {
    StripGrid grid;
    ResidualReport report;
};
std::vector<ConvergenceLevel> refinement_study(const std::function<ResidualReport(const StripGrid&)>& run,
                                               const StripGrid& base, int levels, double floor = 1e-12);

}  // namespace contacton
