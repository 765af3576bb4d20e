#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "ivreg/types.hpp"

namespace ivreg {

/// Thrown when a linear system cannot be solved to the requested accuracy.
class SolveError : public std::runtime_error {
public:
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverOptions {
    double tol = 1e-12;        ///< relative residual tolerance
    int max_iterations = 20000;  ///< CG budget for the fallback
};

/// Direct solver for sparse SPD systems: sparse Cholesky (LDL^T) with a
/// conjugate-gradient fallback when the factorization fails or does not
/// reach the residual tolerance. Solutions are deterministic for fixed
/// inputs.
class SpdSolver {
public:
    explicit SpdSolver(SparseSymMatrix S, SolverOptions opts = {});

    /// Solves S x = rhs with ||S x - rhs|| <= tol * ||rhs||.
    /// Throws SolveError if the matrix is detected indefinite/singular or
    /// the iteration budget is exhausted.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    const SparseSymMatrix& matrix() const { return S_; }
    int size() const { return static_cast<int>(S_.rows()); }

private:
    SparseSymMatrix S_;
    SolverOptions opts_;
    std::unique_ptr<Eigen::SimplicialLDLT<SparseSymMatrix>> ldlt_;
    bool factorized_ok_ = false;
};

/// One-shot convenience wrapper around SpdSolver.
Eigen::VectorXd solve_spd(const SparseSymMatrix& S, const Eigen::VectorXd& rhs,
                          SolverOptions opts = {});

}  // namespace ivreg
