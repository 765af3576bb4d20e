#include "ivreg/param_choice.hpp"

#include <cmath>
#include <stdexcept>

namespace ivreg {

DiscrepancyResult discrepancy(const GridFunction& y_data, double rho,
                              const SsnState& warm_start, const EllipticOperator& op,
                              const SsnParams& ssn_params, NewtonWorkspace* workspace) {
    if (rho < 0.0) {
        throw std::invalid_argument("discrepancy: negative radius");
    }
    DiscrepancyResult result;
    auto [state, report] = ssn_solve(y_data, rho, warm_start, ssn_params, op, workspace);
    result.value = op.data_norm(state.y - y_data);
    result.state = std::move(state);
    result.report = std::move(report);
    return result;
}

namespace {

void validate(const ChoiceParams& params) {
    if (!(params.tau > 1.0)) {
        throw std::invalid_argument("choose_rho: tau must exceed 1");
    }
    if (!(params.rho0 > 0.0)) {
        throw std::invalid_argument("choose_rho: rho0 must be positive");
    }
    if (params.delta < 0.0) {
        throw std::invalid_argument("choose_rho: negative noise level");
    }
    if (params.phase_budget < 1) {
        throw std::invalid_argument("choose_rho: phase budget must be >= 1");
    }
}

}  // namespace

std::pair<SsnState, ChoiceReport> choose_rho(const GridFunction& y_data,
                                             const ChoiceParams& params,
                                             const EllipticOperator& op) {
    validate(params);

    const double delta = params.delta;
    // When even the zero reconstruction already fits the data at noise
    // level (||y_data||_M <= delta), the lower discrepancy bound cannot be
    // reached and only the upper one is enforced.
    const bool lower_bound_vacuous = op.data_norm(y_data) <= delta;

    ChoiceReport report;
    SsnState warm = SsnState::zero(op.size(), params.rho0);
    NewtonWorkspace workspace(op);

    auto run = [&](ChoicePhase phase, int k, double rho) {
        DiscrepancyResult res =
            discrepancy(y_data, rho, warm, op, params.ssn, &workspace);
        report.trace.push_back({phase, k, rho, res.value, res.report.converged,
                                res.state.u.lpNorm<Eigen::Infinity>()});
        if (res.report.converged) {
            warm = res.state;
        }
        return res;
    };
    auto accepted = [&](const DiscrepancyResult& res) {
        if (!res.report.converged) {
            return false;
        }
        if (delta == 0.0) {
            return res.value <= params.zero_noise_floor;
        }
        if (delta <= res.value && res.value <= params.tau * delta) {
            return true;
        }
        return lower_bound_vacuous && res.value <= params.tau * delta;
    };
    auto finish = [&report](DiscrepancyResult res, bool success) {
        report.rho_final = res.state.rho;
        report.discrepancy_final = res.value;
        report.success = success;
        return std::make_pair(std::move(res.state), std::move(report));
    };

    // Phase I: grow rho until a converged solve is below the noise level.
    double rho = params.rho0;
    double increment = params.rho0;
    bool below_noise = false;
    DiscrepancyResult res;
    for (int k = 0; k < params.phase_budget; ++k) {
        res = run(ChoicePhase::increase, k, rho);
        if (accepted(res)) {
            return finish(std::move(res), true);
        }
        below_noise = res.report.converged && res.value < delta;
        if (below_noise) {
            break;
        }
        if (params.adaptive_increase && !res.report.converged) {
            increment *= 2.0;
        }
        rho += increment;
    }
    if (!below_noise) {
        return finish(std::move(res), false);
    }

    // Phase II: halve rho until the misfit exceeds delta or the solver
    // fails. rho_seed tracks the last radius that stayed below delta; it
    // starts at the phase-I exit radius so an immediate phase-II break
    // still leaves a valid seed for the bisection.
    double rho_seed = rho;
    rho /= 2.0;
    bool overshot = false;
    for (int k = 0; k < params.phase_budget; ++k) {
        res = run(ChoicePhase::decrease, k, rho);
        if (accepted(res)) {
            return finish(std::move(res), true);
        }
        overshot = !res.report.converged || res.value > delta;
        if (overshot) {
            break;
        }
        rho_seed = rho;
        rho /= 2.0;
    }
    if (!overshot) {
        return finish(std::move(res), false);
    }

    // Phase III: bisect from the last convergent radius. Overshoot or a
    // failed solve halves the step and backs up; undershoot keeps the step
    // and moves down.
    double drho = rho_seed / 2.0;
    rho = rho_seed - drho;
    for (int k = 0; k < params.phase_budget; ++k) {
        res = run(ChoicePhase::bisect, k, rho);
        if (accepted(res)) {
            return finish(std::move(res), true);
        }
        if (!res.report.converged || res.value > params.tau * delta) {
            drho /= 2.0;
            rho += drho;
        } else {
            rho = std::max(rho - drho, 0.0);
        }
    }
    return finish(std::move(res), false);
}

}  // namespace ivreg
