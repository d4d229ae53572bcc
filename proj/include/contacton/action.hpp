#pragma once

#include "contacton/dynamics.hpp"
#include "contacton/path.hpp"

namespace contacton {

// Trapezoid quadrature of  e^{g_{(phi_H^t)^{-1}}(gamma)} (lambda(gamma') + H(t, gamma)) dt.
double action_value(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                    const PathGamma& gamma);
// Unperturbed action, the integral of gamma^* lambda.
double action_unperturbed(const TriadChart& chart, const PathGamma& gamma);

// gamma_bar(t) = (phi_H^t)^{-1}(gamma(t)).
PathGamma gauge_path(const ContactIsotopy& iso, const PathGamma& gamma);
double action_identity_residual(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                                const PathGamma& gamma);

struct FirstVariation {
    double interior = 0.0;
    double boundary_end = 0.0;    // lambda(eta(1))
    double boundary_start = 0.0;  // weight_start * lambda(eta(0))
    double weight_start = 1.0;    // e^{g_{psi_H^1}(gamma(0))}
    // The reciprocal start weight e^{g_{(psi_H^1)^{-1}}(gamma(0))}, for comparison.
    double weight_start_reciprocal = 1.0;
    double total() const { return interior + boundary_end - boundary_start; }
    double total_reciprocal_weight(double lambda_eta0) const {
        return interior + boundary_end - weight_start_reciprocal * lambda_eta0;
    }
};

// Derivative of action_value along gamma + eps*eta. The interior integrand is
// e^g [dlambda(eta, gamma' - X_H) + (dg ^ lambda)(eta, gamma' - X_H)]; the dg term
// vanishes whenever R[H] is constant in space.
FirstVariation first_variation(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                               const PathGamma& gamma, const VariationField& eta);

double action_difference_quotient(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                                  const PathGamma& gamma, const VariationField& eta, double eps);

// max_k |Pi(gamma'(t_k) - X_H(t_k, gamma(t_k)))| in the triad metric.
double critical_residual(const TriadChart& chart, const HamiltonianSpec& H, const PathGamma& gamma);

}  // namespace contacton
