#pragma once

#include <utility>
#include <vector>

#include "ivreg/ssn.hpp"

namespace ivreg {

struct ChoiceParams {
    double tau = 1.1;    ///< discrepancy factor, > 1
    double rho0 = 10.0;  ///< initial radius and phase-I increment, > 0
    double delta = 0.0;  ///< noise level, >= 0
    SsnParams ssn;
    int phase_budget = 100;          ///< max solves per phase
    bool adaptive_increase = false;  ///< double the phase-I increment after a failed solve
    double zero_noise_floor = 1e-10;  ///< acceptance threshold when delta == 0
};

enum class ChoicePhase { increase = 1, decrease = 2, bisect = 3 };

struct ChoiceTraceEntry {
    ChoicePhase phase;
    int k;  ///< iteration index within the phase
    double rho;
    double discrepancy;
    bool converged;
    double u_inf;  ///< max |u_i| of the returned iterate
};

struct ChoiceReport {
    double rho_final = 0.0;
    double discrepancy_final = 0.0;
    std::vector<ChoiceTraceEntry> trace;
    bool success = false;
};

struct DiscrepancyResult {
    double value = 0.0;  ///< sqrt((y - y_data)' M (y - y_data)) at the final iterate
    SsnState state;
    NewtonReport report;
};

/// Evaluates the distance function at radius rho: runs the Newton solver
/// from warm_start and measures the data misfit of the final state. The
/// value is returned even when the solver did not converge (the report
/// tells).
DiscrepancyResult discrepancy(const GridFunction& y_data, double rho,
                              const SsnState& warm_start, const EllipticOperator& op,
                              const SsnParams& ssn_params,
                              NewtonWorkspace* workspace = nullptr);

/// Radius selection by discrepancy-principle continuation in three phases:
///
///   I   grow rho from rho0 in increments of rho0 until a converged solve
///       has misfit below delta,
///   II  halve rho until the misfit exceeds delta or the solver fails,
///   III bisect from the last convergent radius: step drho starts at half
///       that radius; overshoot (misfit > tau*delta) or failure halves
///       drho and increases rho, undershoot decreases rho by drho.
///
/// Any solve in any phase that lands inside [delta, tau*delta] with a
/// converged Newton iteration ends the search successfully. Each solve
/// warm-starts from the most recent convergent iterate. Two degenerate
/// regimes are accepted explicitly: when delta exceeds ||y_data||_M the
/// lower bound is unattainable and a converged misfit <= tau*delta is
/// accepted, and when delta == 0 a converged misfit below
/// zero_noise_floor counts as an exact solve.
///
/// Returns the selected state and a report carrying the full (phase, rho,
/// misfit) trace; success is false when a phase budget runs out.
std::pair<SsnState, ChoiceReport> choose_rho(const GridFunction& y_data,
                                             const ChoiceParams& params,
                                             const EllipticOperator& op);

}  // namespace ivreg
