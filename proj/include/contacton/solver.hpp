#pragma once

#include "contacton/action.hpp"
#include "contacton/strip.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace contacton {

enum class SeedStrategy { LinearChords, GaugeTransformed };

struct SolveConfig {
    StripGrid grid{-1.0, 1.0, 128, 64};
    LegendrianSpec R0, R1;
    HamiltonianSpec H = HamiltonianSpec::zero(1);
    SeedStrategy seed = SeedStrategy::LinearChords;
    // Parameters on R0 of the chords used as Dirichlet rows at tau0 and tau1.
    Vec anchor_minus, anchor_plus;
    double perturbation = 0.05;  // amplitude of interior bumps added to the seed
    unsigned rng_seed = 1;
    int max_iterations = 400;
    double target_residual = 1e-9;  // on both box-residual L2 norms
    double initial_step = 1.0;      // upper cap on the first trial step of each line search
    double armijo = 1e-4;
    int max_backtracks = 40;
    bool precondition = true;
    int precondition_refresh = 25;
    int isotopy_steps = 1000;
};

struct IterationRecord {
    int iter = 0;
    double objective = 0.0;
    double cr_l2 = 0.0;
    double closed_l2 = 0.0;
    double step = 0.0;
};

struct SolveReport {
    std::string status;  // "converged", "max_iterations", "stalled", "line_search_failure"
    int iterations = 0;
    double objective_initial = 0.0, objective = 0.0;
    double cr_l2 = 0.0, closed_l2 = 0.0;  // box-scheme residuals driven to zero
    StripResidualReport residuals;        // node-stencil residuals of the final field
    double boundary_defect = 0.0;
    double energy = 0.0;
    ActionCharge plus, minus;
    double action_plus = 0.0, action_minus = 0.0, action_gap = 0.0;
    double defect = 0.0;  // |energy - action_gap|
    double chord_T_minus = 0.0, chord_T_plus = 0.0;
    std::vector<IterationRecord> history;
    bool converged() const { return status == "converged"; }
};

struct SolveResult {
    MapField field;
    SolveReport report;
};

// Throws for invalid configs and infeasible chord data (no Reeb chord over an anchor).
SolveResult solve(const TriadChart& chart, const SolveConfig& cfg);

// The seed the solver starts from, before perturbation.
MapField solver_seed(const TriadChart& chart, const SolveConfig& cfg, const ContactIsotopy& iso);

struct ChordFit {
    int row = 0;
    double tau = 0.0;
    Vec s;          // parameter on R0
    double T = 0.0;
    double fit_error = 0.0;  // max node distance between the slice and the fitted chord
    double T_H = 0.0;
    double Q_H = 0.0;
    bool ok = false;
};

struct AsymptoticDiagnostics {
    ChordFit plus, minus;
    std::vector<ChordFit> sequence;  // rows approaching tau1
    double Q_drift = 0.0;            // max |Q_H(s) - Q_H(s')| over the sequence
};

// Fits t-slices against gamma(t) = phi_H^t(phi_R^{T t}(psi_H^1(R0(s)))).
ChordFit fit_chord_slice(const TriadChart& chart, const ContactIsotopy& iso, const MapField& u,
                         const LegendrianSpec& R0, int row, double threshold = 1e-3);
AsymptoticDiagnostics asymptotic_diagnostics(const TriadChart& chart, const ContactIsotopy& iso,
                                             const MapField& u, const LegendrianSpec& R0,
                                             int sequence_length = 5, double threshold = 1e-3);

void write_iteration_csv(std::ostream& os, const SolveReport& r);

}  // namespace contacton
