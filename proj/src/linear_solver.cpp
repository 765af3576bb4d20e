#include "ivreg/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <utility>

namespace ivreg {

SpdSolver::SpdSolver(SparseSymMatrix S, SolverOptions opts)
    : S_(std::move(S)), opts_(opts) {
    if (S_.rows() != S_.cols()) {
        throw std::invalid_argument("SpdSolver: matrix must be square");
    }
    S_.makeCompressed();
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SparseSymMatrix>>();
    ldlt_->compute(S_);
    factorized_ok_ = (ldlt_->info() == Eigen::Success);
    if (factorized_ok_) {
        // LDL^T succeeds formally on indefinite matrices; a nonpositive
        // pivot exposes them.
        if ((ldlt_->vectorD().array() <= 0.0).any()) {
            factorized_ok_ = false;
        }
    }
}

Eigen::VectorXd SpdSolver::solve(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != S_.rows()) {
        throw std::invalid_argument("SpdSolver: rhs size mismatch");
    }
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        return Eigen::VectorXd::Zero(rhs.size());
    }

    Eigen::VectorXd x;
    if (factorized_ok_) {
        x = ldlt_->solve(rhs);
        if ((S_ * x - rhs).norm() <= opts_.tol * rhs_norm) {
            return x;
        }
    } else {
        x = Eigen::VectorXd::Zero(rhs.size());
    }

    Eigen::ConjugateGradient<SparseSymMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(opts_.tol);
    cg.setMaxIterations(opts_.max_iterations);
    cg.compute(S_);
    x = cg.solveWithGuess(rhs, x);
    if ((S_ * x - rhs).norm() <= opts_.tol * rhs_norm) {
        return x;
    }
    throw SolveError(factorized_ok_
                         ? "SpdSolver: iteration budget exhausted"
                         : "SpdSolver: matrix is not positive definite");
}

Eigen::VectorXd solve_spd(const SparseSymMatrix& S, const Eigen::VectorXd& rhs,
                          SolverOptions opts) {
    return SpdSolver(S, opts).solve(rhs);
}

}  // namespace ivreg
