#pragma once

#include "contacton/hamiltonian.hpp"
#include "contacton/path.hpp"
#include "contacton/triad.hpp"

#include <functional>
#include <vector>

namespace contacton {

// Unique X with lambda(X) = -H and X _| dlambda = dH - R[H] lambda, by solving
// the linear system in the frame (lambda; dlambda(., e_i); dlambda(., f_i)).
Vec hamiltonian_vector_field(const TriadChart& chart, const HamiltonianSpec& H, double t, const Vec& p);
TangentVec hamiltonian_vector_field(const TriadChart& chart, const HamiltonianSpec& H, double t,
                                    const TriadPoint& p);

// Closed form of the same field in the standard chart, and its Jacobian.
Vec contact_field(const TriadChart& chart, const HamiltonianSpec& H, double t, const Vec& p);
Mat contact_field_jacobian(const TriadChart& chart, const HamiltonianSpec& H, double t, const Vec& p);

struct FlowResult {
    Vec point;
    double g = 0.0;  // conformal exponent of the transport map at the start point
    Mat D;           // differential, when requested
};

// Flow of X_H sampled on t_k = k/N. Any two-time transport Phi_{s->t} is
// re-integrated on demand with RK4 steps no longer than 1/N.
class ContactIsotopy {
public:
    ContactIsotopy(TriadChart chart, HamiltonianSpec H, int steps = 1000, double blowup_bound = 1e6);

    const TriadChart& chart() const { return chart_; }
    const HamiltonianSpec& hamiltonian() const { return H_; }
    int steps() const { return steps_; }
    double dt() const { return 1.0 / steps_; }
    double time(int k) const { return static_cast<double>(k) / steps_; }

    // Phi_{from->to}: the flow map from time `from` to time `to`.
    FlowResult transport(const Vec& p, double from, double to, bool with_differential = false) const;

    Vec psi(double t, const Vec& p) const { return transport(p, 0.0, t).point; }
    double g_psi(double t, const Vec& p) const { return transport(p, 0.0, t).g; }
    Vec psi1_inverse(const Vec& p) const { return transport(p, 1.0, 0.0).point; }
    // phi_H^t = psi_H^t (psi_H^1)^{-1} = Phi_{1->t}, and its inverse Phi_{t->1}.
    Vec phi(double t, const Vec& p) const { return transport(p, 1.0, t).point; }
    Vec phi_inverse(double t, const Vec& p) const { return transport(p, t, 1.0).point; }
    // g_{(phi_H^t)^{-1}}(p); the g_{H,u} evaluator when p = u(tau, t).
    double g_Hu(double t, const Vec& p) const;
    // Exponent of Phi_{from->to} at p, skipping the point flow when R[H] is constant in space.
    double exponent(const Vec& p, double from, double to) const;

    std::vector<Vec> samples;
    std::vector<std::vector<Vec>> trajectories;   // trajectories[s][k] = psi^{t_k}(samples[s])
    std::vector<std::vector<double>> exponents;   // exponents[s][k] = g_{psi^{t_k}}(samples[s])

private:
    TriadChart chart_;
    HamiltonianSpec H_;
    int steps_;
    double bound_;
};

ContactIsotopy integrate_isotopy(const TriadChart& chart, const HamiltonianSpec& H, int steps,
                                 const std::vector<Vec>& samples = {});

// |g_{psi^{-1}}(p) + g_psi(psi^{-1}(p))| for psi = psi_H^t.
double conformal_exponent_inverse_check(const ContactIsotopy& iso, const Vec& p, double t = 1.0);
// |g_{psi o phi}(p) - g_psi(phi(p)) - g_phi(p)| with psi, phi the time-one maps of two
// isotopies; the left side comes from the differential, the right from exponent ODEs.
double conformal_exponent_composition_check(const ContactIsotopy& psi, const ContactIsotopy& phi,
                                            const Vec& p);
// |lambda(dpsi v) - e^{g} lambda(v)| for psi = psi_H^t.
double pullback_residual(const ContactIsotopy& iso, double t, const Vec& p, const Vec& v);

// Reeb chord from psi^1(R0) to R1 starting over the anchor point R0.at(s), and
// its image gamma(t) = phi_H^t(phi_R^{Tt}(psi^1 p)).
// Closed-form flow of H = z from time `from` to `to`: x fixed, (y, z) scaled by e^{-(to - from)},
// conformal exponent -(to - from).
FlowResult linear_z_flow(const TriadChart& chart, const Vec& p, double from, double to);

struct ReebChord {
    Vec p;
    Vec q;
    double T = 0.0;
    double defect = 0.0;
    Vec at(const ContactIsotopy& iso, double t) const;
    PathGamma path(const ContactIsotopy& iso, int N) const;
};
ReebChord find_chord(const ContactIsotopy& iso, const LegendrianSpec& R0, const LegendrianSpec& R1,
                     const Vec& anchor, double tol = 1e-8);

// Image of an affine Legendrian under Phi_{from->to}, linearized at its base point.
LegendrianSpec transport_legendrian(const ContactIsotopy& iso, const LegendrianSpec& R, double from,
                                   double to);

struct LiftResult {
    std::vector<double> rho;   // rho(t_k)
    PathGamma tilde_gamma;
    HamiltonianSpec tilde_H;
    double residual = 0.0;     // max |d/dt tilde_gamma - X_{tilde H}(t, tilde_gamma)|
    double pi_residual = 0.0;  // critical residual of the input path
};
LiftResult lift_to_hamiltonian_trajectory(const TriadChart& chart, const HamiltonianSpec& H,
                                          const PathGamma& gamma, double pi_threshold = 1e-4);

}  // namespace contacton
