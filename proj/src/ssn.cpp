#include "ivreg/ssn.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ivreg {

SsnState SsnState::zero(int n, double rho) {
    SsnState s;
    s.y = GridFunction::Zero(n);
    s.p = GridFunction::Zero(n);
    s.u = GridFunction::Zero(n);
    s.rho = rho;
    return s;
}

const char* to_string(SsnTermination reason) {
    switch (reason) {
        case SsnTermination::active_sets_stable: return "active_sets_stable";
        case SsnTermination::residual_below_tol: return "residual_below_tol";
        case SsnTermination::max_iterations: return "max_iterations";
        case SsnTermination::line_search_failure: return "line_search_failure";
        case SsnTermination::linear_solve_failure: return "linear_solve_failure";
    }
    return "unknown";
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v, double rho) {
    if (rho < 0.0) {
        throw std::invalid_argument("project_box: negative radius");
    }
    return v.cwiseMin(rho).cwiseMax(-rho);
}

ActiveSets compute_active_sets(const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                               double rho) {
    if (u.size() != p.size()) {
        throw std::invalid_argument("compute_active_sets: size mismatch");
    }
    ActiveSets sets;
    for (int i = 0; i < u.size(); ++i) {
        const double d = u[i] - p[i];
        if (d > rho) {
            sets.a_plus.push_back(i);
        } else if (d < -rho) {
            sets.a_minus.push_back(i);
        } else {
            sets.inactive.push_back(i);
        }
    }
    return sets;
}

Eigen::VectorXd newton_residual(const SsnState& state, const EllipticOperator& op,
                                const GridFunction& y_data) {
    const int n = op.size();
    if (state.y.size() != n || state.p.size() != n || state.u.size() != n ||
        y_data.size() != n) {
        throw std::invalid_argument("newton_residual: size mismatch");
    }
    const SparseSymMatrix& L = op.system_matrix();
    const SparseSymMatrix& M = op.mass();

    // M p is the gradient of the misfit u -> 0.5 ||A u - y_data||_M^2, so the
    // third block is the exact first-order condition of the constrained
    // discrete problem (the adjoint state alone is its Riesz representative
    // and would not reproduce the discrete minimizer).
    Eigen::VectorXd b(3 * n);
    b.segment(0, n) = L * state.y - M * state.u;
    b.segment(n, n) = L * state.p - M * (state.y - y_data);
    b.segment(2 * n, n) =
        state.u - project_box(state.u - M * state.p, state.rho);
    return b;
}

// Holds the 3N x 3N Newton matrix with a fixed sparsity pattern: the last
// block row carries both the M rows (for dp over the inactive set) and the
// unit diagonal (for du over the active sets); switching the partition only
// rewrites values, so the fill-reducing ordering is computed once and every
// iteration pays the numeric factorization only.
class NewtonWorkspace::Impl {
public:
    explicit Impl(const EllipticOperator& op) : op_(op), n_(op.size()) {
        const SparseSymMatrix& L = op.system_matrix();
        const SparseSymMatrix& M = op.mass();

        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(2 * static_cast<std::size_t>(L.nonZeros()) +
                         3 * static_cast<std::size_t>(M.nonZeros()) + n_);
        for (int k = 0; k < L.outerSize(); ++k) {
            for (SparseSymMatrix::InnerIterator it(L, k); it; ++it) {
                triplets.emplace_back(it.row(), it.col(), it.value());
                triplets.emplace_back(n_ + it.row(), n_ + it.col(), it.value());
            }
        }
        for (int k = 0; k < M.outerSize(); ++k) {
            for (SparseSymMatrix::InnerIterator it(M, k); it; ++it) {
                triplets.emplace_back(it.row(), 2 * n_ + it.col(), -it.value());
                triplets.emplace_back(n_ + it.row(), it.col(), -it.value());
                triplets.emplace_back(2 * n_ + it.row(), n_ + it.col(), 0.0);
            }
        }
        for (int i = 0; i < n_; ++i) {
            triplets.emplace_back(2 * n_ + i, 2 * n_ + i, 0.0);
        }
        matrix_.resize(3 * n_, 3 * n_);
        matrix_.setFromTriplets(triplets.begin(), triplets.end());
        matrix_.makeCompressed();

        // locate the mutable entries of the last block row in the value array
        for (int col = 0; col < 3 * n_; ++col) {
            for (int idx = matrix_.outerIndexPtr()[col];
                 idx < matrix_.outerIndexPtr()[col + 1]; ++idx) {
                const int row = matrix_.innerIndexPtr()[idx];
                if (row < 2 * n_) {
                    continue;
                }
                const int node = row - 2 * n_;
                if (col >= n_ && col < 2 * n_) {
                    gradient_slots_.push_back(
                        {idx, node, M.coeff(node, col - n_)});
                } else if (col == 2 * n_ + node) {
                    diagonal_slots_.push_back({idx, node, 1.0});
                }
            }
        }
        lu_.analyzePattern(matrix_);
    }

    std::optional<NewtonStep> step(const SsnState& state, const ActiveSets& sets,
                                   const GridFunction& y_data) {
        std::vector<bool> inactive(n_, false);
        for (int i : sets.inactive) {
            inactive[i] = true;
        }
        double* values = matrix_.valuePtr();
        for (const Slot& s : gradient_slots_) {
            values[s.index] = inactive[s.node] ? s.value : 0.0;
        }
        for (const Slot& s : diagonal_slots_) {
            values[s.index] = inactive[s.node] ? 0.0 : 1.0;
        }

        lu_.factorize(matrix_);
        if (lu_.info() != Eigen::Success) {
            return std::nullopt;
        }
        const Eigen::VectorXd rhs = -newton_residual(state, op_, y_data);
        const Eigen::VectorXd d = lu_.solve(rhs);
        if (lu_.info() != Eigen::Success || !d.allFinite()) {
            return std::nullopt;
        }

        NewtonStep step;
        step.dy = d.segment(0, n_);
        step.dp = d.segment(n_, n_);
        step.du = d.segment(2 * n_, n_);
        return step;
    }

private:
    struct Slot {
        int index;
        int node;
        double value;
    };

    const EllipticOperator& op_;
    int n_;
    SparseSymMatrix matrix_;
    std::vector<Slot> gradient_slots_;
    std::vector<Slot> diagonal_slots_;
    Eigen::SparseLU<SparseSymMatrix> lu_;
};

NewtonWorkspace::NewtonWorkspace(const EllipticOperator& op)
    : impl_(std::make_unique<Impl>(op)) {}
NewtonWorkspace::~NewtonWorkspace() = default;
NewtonWorkspace::NewtonWorkspace(NewtonWorkspace&&) noexcept = default;
NewtonWorkspace& NewtonWorkspace::operator=(NewtonWorkspace&&) noexcept = default;

std::optional<NewtonStep> NewtonWorkspace::step(const SsnState& state,
                                                const ActiveSets& sets,
                                                const GridFunction& y_data) {
    return impl_->step(state, sets, y_data);
}

std::optional<NewtonStep> newton_step(const SsnState& state, const ActiveSets& sets,
                                      const EllipticOperator& op,
                                      const GridFunction& y_data) {
    NewtonWorkspace workspace(op);
    return workspace.step(state, sets, y_data);
}

namespace {

double residual_norm(const Eigen::VectorXd& b, const EllipticOperator& op,
                     const SsnParams& params) {
    if (!params.mass_weighted_norm) {
        return b.norm();
    }
    const int n = op.size();
    double q = 0.0;
    for (int j = 0; j < 3; ++j) {
        const Eigen::VectorXd block = b.segment(j * n, n);
        q += block.dot(op.mass() * block);
    }
    return std::sqrt(q);
}

void validate(const SsnParams& params, double rho) {
    if (!(params.q > 0.0 && params.q < 1.0)) {
        throw std::invalid_argument("ssn_solve: q must lie in (0,1)");
    }
    if (params.max_line_search < 1 || params.max_iterations < 1) {
        throw std::invalid_argument("ssn_solve: iteration budgets must be >= 1");
    }
    if (!(params.tol > 0.0)) {
        throw std::invalid_argument("ssn_solve: tol must be positive");
    }
    if (rho < 0.0) {
        throw std::invalid_argument("ssn_solve: negative radius");
    }
}

}  // namespace

std::pair<SsnState, NewtonReport> ssn_solve(const GridFunction& y_data, double rho,
                                            const SsnState& start,
                                            const SsnParams& params,
                                            const EllipticOperator& op,
                                            NewtonWorkspace* workspace) {
    validate(params, rho);

    SsnState state = start;
    state.rho = rho;

    NewtonReport report;
    std::optional<NewtonWorkspace> local;
    if (!workspace) {
        local.emplace(op);
        workspace = &*local;
    }
    ActiveSets prev_sets;
    bool have_prev_sets = false;

    double bnorm = residual_norm(newton_residual(state, op, y_data), op, params);

    for (int k = 1; k <= params.max_iterations; ++k) {
        const ActiveSets sets =
            compute_active_sets(state.u, op.mass() * state.p, rho);
        report.residual_history.push_back(bnorm);
        if (params.trace) {
            *params.trace << "ssn k=" << k << " residual=" << bnorm
                          << " active+=" << sets.a_plus.size()
                          << " active-=" << sets.a_minus.size()
                          << " inactive=" << sets.inactive.size();
        }

        if (bnorm < params.tol) {
            if (params.trace) {
                *params.trace << " converged\n";
            }
            report.converged = true;
            report.final_residual = bnorm;
            report.reason = (have_prev_sets && sets.same_bounds(prev_sets))
                                ? SsnTermination::active_sets_stable
                                : SsnTermination::residual_below_tol;
            return {state, report};
        }

        const auto step = workspace->step(state, sets, y_data);
        if (!step) {
            if (params.trace) {
                *params.trace << " singular step system\n";
            }
            report.final_residual = bnorm;
            report.reason = SsnTermination::linear_solve_failure;
            return {state, report};
        }

        bool accepted = false;
        for (int i = 1; i <= params.max_line_search; ++i) {
            const double t = std::pow(params.q, i - 1);
            SsnState trial;
            trial.y = state.y + t * step->dy;
            trial.p = state.p + t * step->dp;
            trial.u = state.u + t * step->du;
            trial.rho = rho;
            const double trial_norm =
                residual_norm(newton_residual(trial, op, y_data), op, params);
            if (trial_norm < bnorm) {
                state = std::move(trial);
                bnorm = trial_norm;
                ++report.iterations;
                report.step_kinds.push_back('n');
                accepted = true;
                if (params.trace) {
                    *params.trace << " step=" << t << "\n";
                }
                break;
            }
        }
        if (!accepted && params.rescue_full_step) {
            // Non-monotone fallback: jump to the solution of the current
            // active-set guess and let the partition update.
            SsnState trial;
            trial.y = state.y + step->dy;
            trial.p = state.p + step->dp;
            trial.u = state.u + step->du;
            trial.rho = rho;
            const double trial_norm =
                residual_norm(newton_residual(trial, op, y_data), op, params);
            if (std::isfinite(trial_norm)) {
                state = std::move(trial);
                bnorm = trial_norm;
                ++report.iterations;
                ++report.rescue_steps;
                report.step_kinds.push_back('r');
                accepted = true;
                if (params.trace) {
                    *params.trace << " rescue step\n";
                }
            }
        }
        if (!accepted) {
            if (params.trace) {
                *params.trace << " line search failed\n";
            }
            report.final_residual = bnorm;
            report.reason = SsnTermination::line_search_failure;
            return {state, report};
        }

        prev_sets = sets;
        have_prev_sets = true;
    }

    report.final_residual = bnorm;
    report.reason = SsnTermination::max_iterations;
    return {state, report};
}

}  // namespace ivreg
