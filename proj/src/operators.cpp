#include "ivreg/operators.hpp"

#include <stdexcept>
#include <utility>

namespace ivreg {

namespace {

SparseSymMatrix shifted(const SparseSymMatrix& K, const SparseSymMatrix& M, double c) {
    if (K.rows() != M.rows() || K.cols() != M.cols()) {
        throw std::invalid_argument("EllipticOperator: K and M dimensions differ");
    }
    if (c <= 0.0) {
        throw std::invalid_argument("EllipticOperator: shift c must be positive");
    }
    SparseSymMatrix L = K + c * M;
    L.makeCompressed();
    return L;
}

}  // namespace

EllipticOperator::EllipticOperator(SparseSymMatrix K, SparseSymMatrix M, double c,
                                   SolverOptions opts)
    : stiffness_(std::move(K)),
      mass_(std::move(M)),
      c_(c),
      solver_(shifted(stiffness_, mass_, c), opts) {}

Eigen::VectorXd EllipticOperator::solve_system(const Eigen::VectorXd& rhs) const {
    return solver_.solve(rhs);
}

GridFunction EllipticOperator::forward(const GridFunction& u) const {
    return solver_.solve(mass_ * u);
}

GridFunction EllipticOperator::adjoint(const GridFunction& residual) const {
    return solver_.solve(mass_ * residual);
}

double EllipticOperator::data_norm(const Eigen::VectorXd& v) const {
    return mass_norm(mass_, v);
}

GridFunction forward_solve(const SparseSymMatrix& K, const SparseSymMatrix& M,
                           double c, const GridFunction& u, SolverOptions opts) {
    return EllipticOperator(K, M, c, opts).forward(u);
}

GridFunction adjoint_solve(const SparseSymMatrix& K, const SparseSymMatrix& M,
                           double c, const GridFunction& residual, SolverOptions opts) {
    return EllipticOperator(K, M, c, opts).adjoint(residual);
}

}  // namespace ivreg
