#pragma once

#include "contacton/dynamics.hpp"

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace contacton {

// Uniform nodes tau_i = tau0 + i dtau (i = 0..M), t_j = j dt (j = 0..N) on
// [tau0, tau1] x [0, 1], flat metric, domain one-form dt.
struct StripGrid {
    double tau0 = 0.0, tau1 = 1.0;
    int M = 16, N = 16;

    StripGrid() = default;
    StripGrid(double a, double b, int M_, int N_);

    double dtau() const { return (tau1 - tau0) / M; }
    double dt() const { return 1.0 / N; }
    double tau(int i) const { return tau0 + i * dtau(); }
    double t(int j) const { return j * dt(); }
    int index(int i, int j) const { return i * (N + 1) + j; }
    int nodes() const { return (M + 1) * (N + 1); }
    // Trapezoid weight of node (i, j) in the area integral.
    double weight(int i, int j) const;
    double spacing() const { return std::max(dtau(), dt()); }
    StripGrid refined() const { return StripGrid(tau0, tau1, 2 * M, 2 * N); }
};

struct MapField {
    StripGrid grid;
    int n = 1;
    std::vector<Vec> u;
    std::optional<LegendrianSpec> R0, R1;
    std::vector<double> gHu;  // cached g_{H,u} per node; empty when not attached

    MapField() = default;
    MapField(StripGrid g, int n_);
    static MapField sample(const StripGrid& g, int n, const std::function<Vec(double, double)>& f);

    Vec& at(int i, int j) { return u[grid.index(i, j)]; }
    const Vec& at(int i, int j) const { return u[grid.index(i, j)]; }
    Vec d_tau(int i, int j) const;
    Vec d_t(int i, int j) const;
    // Largest distance of boundary rows from their tagged Legendrians.
    double boundary_defect() const;
    void attach_exponents(const ContactIsotopy& iso);
};

struct OneFormField {
    std::vector<Vec> on_tau, on_t;
};

struct DHFields {
    OneFormField dH;       // d_H u on (d_tau, d_t)
    OneFormField dH_pi;    // its xi-part
    OneFormField pi_frame; // xi-part in unitary frame components (length 2n)
    std::vector<std::array<double, 2>> lambdaH;  // u^*lambda_H on (d_tau, d_t)
    std::vector<Vec> X;    // X_H(t_j, u_ij)
};
DHFields assemble_dH(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u);

struct NodeNorms {
    double l2 = 0.0;
    double max = 0.0;
};

struct CRResidual {
    std::vector<Vec> value;  // (d^pi_H u + J d^pi_H u j)(d_tau) / 2 in frame components
    NodeNorms norms;
};
CRResidual cr_residual(const TriadChart& chart, const HamiltonianSpec& H, const MapField& u);

struct ClosednessResidual {
    std::vector<double> value;  // d(e^g u^*lambda_H o j)(d_tau, d_t) at cell centres, cell (i, j) at i*N + j
    NodeNorms norms;
};
ClosednessResidual closedness_residual(const TriadChart& chart, const HamiltonianSpec& H,
                                       const ContactIsotopy& iso, const MapField& u);

struct StripResidualReport {
    double cr_l2 = 0.0, cr_max = 0.0, closed_l2 = 0.0, closed_max = 0.0;
    std::optional<double> order_estimate;
};
StripResidualReport strip_residuals(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso,
                                    const MapField& u);

// Cell-midpoint quadrature of (1/2) e^{g_{H,u}} |d^pi_H u|^2 over cells with i in [i_begin, i_end).
double pi_energy(const TriadChart& chart, const HamiltonianSpec& H, const ContactIsotopy& iso, const MapField& u,
                 int i_begin = 0, int i_end = -1);

enum class GaugeDirection {
    ToUnperturbed,  // u_bar = (phi_H^t)^{-1}(u)
    ToPerturbed     // u = phi_H^t(u_bar)
};
MapField gauge_transform(const ContactIsotopy& iso, const MapField& u, GaugeDirection dir);

struct GaugeEquivalence {
    StripResidualReport perturbed;
    StripResidualReport unperturbed;
    MapField ubar;
    double energy_perturbed = 0.0;
    double energy_unperturbed = 0.0;
};
GaugeEquivalence gauge_equivalence_check(const TriadChart& chart, const HamiltonianSpec& H,
                                         const ContactIsotopy& iso, const MapField& u);

enum class StripEnd { Positive, Negative };
struct ActionCharge {
    int row = 0;
    double T_H = 0.0;
    double Q_H = 0.0;
    double slice_action = 0.0;  // integral of e^g u^*(lambda + H dt) over the slice
    double energy = 0.0;        // pi-energy between the slice and the chosen end
};
// The slice snaps to the nearest grid row. At the negative end the energy enters with a minus sign.
ActionCharge asymptotic_action_charge(const TriadChart& chart, const HamiltonianSpec& H,
                                      const ContactIsotopy& iso, const MapField& u, double s,
                                      StripEnd end = StripEnd::Positive);

// Row i of the field as a path in t.
PathGamma row_path(const MapField& u, int i);

void write_field_csv(std::ostream& os, const MapField& u);
MapField read_field_csv(std::istream& is, int n);
// Header: "CTNF", u32 version, u32 M, u32 N, u32 dim, f64 tau0, f64 tau1; then node data in index order.
void write_field_binary(std::ostream& os, const MapField& u);
MapField read_field_binary(std::istream& is);

}  // namespace contacton
