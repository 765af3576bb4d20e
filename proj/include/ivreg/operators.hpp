#pragma once

#include "ivreg/assembly.hpp"
#include "ivreg/linear_solver.hpp"
#include "ivreg/types.hpp"

namespace ivreg {

/// Discrete source-to-state map for -Laplace(y) + c*y = u with homogeneous
/// Neumann boundary: y solves (K + cM) y = M u. The shifted matrix is
/// factorized once and reused by all solves. Since K + cM is symmetric,
/// forward and adjoint applications use the same factorization.
class EllipticOperator {
public:
    /// Requires c > 0 (the shift makes K + cM positive definite).
    EllipticOperator(SparseSymMatrix K, SparseSymMatrix M, double c,
                     SolverOptions opts = {});

    int size() const { return static_cast<int>(mass_.rows()); }
    double shift() const { return c_; }
    const SparseSymMatrix& stiffness() const { return stiffness_; }
    const SparseSymMatrix& mass() const { return mass_; }
    const SparseSymMatrix& system_matrix() const { return solver_.matrix(); }

    /// (K + cM)^{-1} rhs.
    Eigen::VectorXd solve_system(const Eigen::VectorXd& rhs) const;

    /// Forward map u -> y with (K + cM) y = M u.
    GridFunction forward(const GridFunction& u) const;

    /// Adjoint map r -> p with (K + cM) p = M r, for r = y - y_data.
    GridFunction adjoint(const GridFunction& residual) const;

    /// Discrete L2 norm sqrt(v'Mv).
    double data_norm(const Eigen::VectorXd& v) const;

private:
    SparseSymMatrix stiffness_;
    SparseSymMatrix mass_;
    double c_;
    SpdSolver solver_;
};

/// Free-function forms; each call factorizes K + cM from scratch.
GridFunction forward_solve(const SparseSymMatrix& K, const SparseSymMatrix& M,
                           double c, const GridFunction& u, SolverOptions opts = {});
GridFunction adjoint_solve(const SparseSymMatrix& K, const SparseSymMatrix& M,
                           double c, const GridFunction& residual,
                           SolverOptions opts = {});

}  // namespace ivreg
